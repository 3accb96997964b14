import { ApiClient } from "./api.js";
import { Store } from "./state.js";
import { mount } from "./ui.js";

const root = document.getElementById("app");
if (root) {
  mount(root, new Store(new ApiClient("")));
}
