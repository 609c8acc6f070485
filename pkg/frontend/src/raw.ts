/**
 * Exact-byte field extraction from canonical JSON bodies.
 *
 * The workbench must display numbers exactly as the API rendered them
 * (fixed six-decimal ratios), so displayed values are sliced out of the
 * response text rather than re-rendered from parsed floats.
 */

export type PathSegment = string | number;

class Scanner {
  pos = 0;

  constructor(readonly text: string) {}

  fail(message: string): never {
    throw new Error(`raw-field scan failed at ${this.pos}: ${message}`);
  }

  peek(): string {
    if (this.pos >= this.text.length) this.fail("unexpected end of input");
    return this.text[this.pos];
  }

  expect(ch: string): void {
    if (this.peek() !== ch) this.fail(`expected ${ch}, found ${this.peek()}`);
    this.pos += 1;
  }

  /** Parse the string token at pos, returning its decoded value. */
  readString(): string {
    const start = this.pos;
    this.expect('"');
    while (this.peek() !== '"') {
      if (this.peek() === "\\") this.pos += 1;
      this.pos += 1;
    }
    this.pos += 1;
    return JSON.parse(this.text.slice(start, this.pos)) as string;
  }

  /** Advance past the value at pos; returns its [start, end) span. */
  skipValue(): [number, number] {
    const start = this.pos;
    const ch = this.peek();
    if (ch === '"') {
      this.readString();
    } else if (ch === "{") {
      this.pos += 1;
      if (this.peek() === "}") {
        this.pos += 1;
      } else {
        for (;;) {
          this.readString();
          this.expect(":");
          this.skipValue();
          if (this.peek() === "}") {
            this.pos += 1;
            break;
          }
          this.expect(",");
        }
      }
    } else if (ch === "[") {
      this.pos += 1;
      if (this.peek() === "]") {
        this.pos += 1;
      } else {
        for (;;) {
          this.skipValue();
          if (this.peek() === "]") {
            this.pos += 1;
            break;
          }
          this.expect(",");
        }
      }
    } else {
      // number / true / false / null: runs until a structural character
      while (
        this.pos < this.text.length &&
        !",}]".includes(this.text[this.pos])
      ) {
        this.pos += 1;
      }
      if (this.pos === start) this.fail("empty value");
    }
    return [start, this.pos];
  }

  /** Span of the value reached by walking `path` from the value at pos. */
  valueSpan(path: PathSegment[]): [number, number] {
    if (path.length === 0) return this.skipValue();
    const [head, ...rest] = path;
    if (typeof head === "string") {
      this.expect("{");
      for (;;) {
        const key = this.readString();
        this.expect(":");
        if (key === head) return this.valueSpan(rest);
        this.skipValue();
        if (this.peek() === "}") this.fail(`key not found: ${head}`);
        this.expect(",");
      }
    }
    this.expect("[");
    for (let index = 0; ; index += 1) {
      if (this.peek() === "]") this.fail(`index out of range: ${head}`);
      if (index === head) return this.valueSpan(rest);
      this.skipValue();
      if (this.peek() === ",") this.pos += 1;
    }
  }
}

/** The exact source text of the value at `path` inside canonical JSON. */
export function rawValue(text: string, path: PathSegment[]): string {
  const scanner = new Scanner(text);
  const [start, end] = scanner.valueSpan(path);
  return text.slice(start, end);
}

/** rawValue for display: unquotes strings, passes every other token through. */
export function rawDisplay(text: string, path: PathSegment[]): string {
  const token = rawValue(text, path);
  return token.startsWith('"') ? (JSON.parse(token) as string) : token;
}
