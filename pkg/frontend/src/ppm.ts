/** Binary PPM (P6) decoding for canvas display. */

export interface DecodedImage {
  width: number;
  height: number;
  /** RGBA bytes, 4 per pixel, alpha 255. */
  rgba: Uint8ClampedArray<ArrayBuffer>;
}

export function base64ToBytes(b64: string): Uint8Array {
  const binary = atob(b64);
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) bytes[i] = binary.charCodeAt(i);
  return bytes;
}

/** Decode a binary P6 PPM with maxval 255. */
export function decodePpm(data: Uint8Array): DecodedImage {
  const header = readHeader(data);
  if (header.magic !== "P6") throw new Error(`expected P6, got ${header.magic}`);
  if (header.maxval !== 255) throw new Error(`expected maxval 255, got ${header.maxval}`);
  const { width, height, offset } = header;
  const expected = width * height * 3;
  if (data.length - offset < expected) {
    throw new Error(`truncated PPM: need ${expected} bytes, have ${data.length - offset}`);
  }
  const rgba = new Uint8ClampedArray(new ArrayBuffer(width * height * 4));
  for (let p = 0, s = offset; p < width * height; p++, s += 3) {
    rgba[p * 4] = data[s];
    rgba[p * 4 + 1] = data[s + 1];
    rgba[p * 4 + 2] = data[s + 2];
    rgba[p * 4 + 3] = 255;
  }
  return { width, height, rgba };
}

interface PnmHeader {
  magic: string;
  width: number;
  height: number;
  maxval: number;
  offset: number;
}

function readHeader(data: Uint8Array): PnmHeader {
  const magic = String.fromCharCode(data[0], data[1]);
  let pos = 2;
  const fields: number[] = [];
  while (fields.length < 3) {
    while (pos < data.length && isSpace(data[pos])) pos++;
    if (data[pos] === 0x23) {
      // '#' comment runs to end of line
      while (pos < data.length && data[pos] !== 0x0a) pos++;
      continue;
    }
    let value = 0;
    let any = false;
    while (pos < data.length && !isSpace(data[pos])) {
      value = value * 10 + (data[pos] - 0x30);
      any = true;
      pos++;
    }
    if (!any) throw new Error("truncated PNM header");
    fields.push(value);
  }
  pos++; // single whitespace byte after maxval
  return { magic, width: fields[0], height: fields[1], maxval: fields[2], offset: pos };
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d;
}
