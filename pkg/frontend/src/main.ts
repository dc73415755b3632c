/** Entry point: mount the app shell into #app once the DOM is ready. */

import { App } from "./app";

function boot(): void {
  const host = document.getElementById("app");
  if (!host) throw new Error("missing #app mount point");
  void new App().mount(host);
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", boot);
} else {
  boot();
}
