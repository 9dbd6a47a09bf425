/** Download descriptors for the current (possibly filtered) view.
 *
 * The text is always a server serialization handed through unchanged;
 * the client never re-encodes a graph it exports.
 */

export interface ExportFile {
  filename: string;
  mime: string;
  text: string;
}

function stem(dataset: string): string {
  const cleaned = dataset.replace(/[^A-Za-z0-9._-]+/g, "_");
  return cleaned || "graph";
}

export function turtleFile(dataset: string, text: string): ExportFile {
  return { filename: `${stem(dataset)}.ttl`, mime: "text/turtle", text };
}

export function jsonFile(dataset: string, text: string): ExportFile {
  return { filename: `${stem(dataset)}.kg.json`, mime: "application/json", text };
}
