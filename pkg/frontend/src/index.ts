export * from "./api.js";
export * from "./brush.js";
export * from "./colormap.js";
export * from "./state.js";
export * from "./tree.js";
