import { Api } from "./api";
import { mount } from "./app";
import "./style.css";

const params = new URLSearchParams(window.location.search);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
mount(root, new Api(""), params.get("actor") ?? "reviewer");
