import { ExplorerApp } from "./app";

const app = new ExplorerApp();
app.start().catch((err) => {
  const panel = document.getElementById("metrics");
  if (panel) panel.textContent = `failed to connect: ${err}`;
});
