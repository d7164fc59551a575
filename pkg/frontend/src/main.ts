/** Browser entry point: mount into #root against the serving origin. */

import { bootstrap } from "./app.js";

const root = document.getElementById("root");
if (root) {
  bootstrap(document, root, "");
}
