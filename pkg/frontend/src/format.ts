// Single source of truth for how numbers appear in the UI, so tests can
// assert that every rendered value is the formatted fixture value.

export function score(x: number): string {
  return x.toFixed(2);
}

export function metric(x: number): string {
  return x.toFixed(3);
}

export function signed(x: number): string {
  return (x >= 0 ? "+" : "") + x.toFixed(2);
}

export function phi(x: number): string {
  return (x >= 0 ? "+" : "") + x.toFixed(3);
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}
