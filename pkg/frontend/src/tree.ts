/**
 * Helpers for rendering the server's dendrogram payloads: depth cuts for
 * the parameter-tree slider and leaf lookup for hover highlighting. The
 * tree itself comes from the service untouched.
 */

import type { TreeNode } from "./api.js";

export function leavesUnder(node: TreeNode): number[] {
  if (!node.children || node.children.length === 0) return [node.id];
  return node.children.flatMap(leavesUnder).sort((a, b) => a - b);
}

/**
 * Clusters visible at a depth setting: depth 1 is the whole tree as one
 * cluster; each extra depth level descends one merge. Returns the leaf
 * sets of the exposed subtrees, ordered by smallest leaf.
 */
export function clustersAtDepth(root: TreeNode, depth: number): number[][] {
  if (!Number.isInteger(depth) || depth < 1) throw new Error(`bad depth ${depth}`);
  let frontier: TreeNode[] = [root];
  for (let level = 1; level < depth; level++) {
    const next: TreeNode[] = [];
    let split = false;
    // expand the frontier node with the highest merge height
    const target = frontier.reduce((a, b) =>
      (b.children && (!a.children || b.height > a.height)) ? b : a);
    for (const node of frontier) {
      if (!split && node === target && node.children) {
        next.push(...node.children);
        split = true;
      } else {
        next.push(node);
      }
    }
    if (!split) break; // all leaves exposed
    frontier = next;
  }
  return frontier
    .map(leavesUnder)
    .sort((a, b) => a[0]! - b[0]!);
}
