"""Minimal PDF rasterizer for image-based documents.

Supports the structure common to scanned-document PDFs: classic xref tables
(with a whole-file object rescue scan as fallback), Flate/DCT/ASCIIHex
filters, the page tree with inherited attributes, and a content-stream subset
of q/Q, cm, rgb/gray fill color, rectangle fills, and image XObjects placed
by affine matrices. Vector text and general path content leave no ink; this
toolchain parses from pixels, so PDFs are expected to carry raster content.

Pixel convention: PDF user space has y up; pages rasterize to row-major RGB
with width = round(box_width / 72 * dpi) exactly.
"""

from __future__ import annotations

import io
import re
import zlib
from dataclasses import dataclass, field

import numpy as np

from .errors import CorruptFile, PageOutOfRange
from .model import PageImage

_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMS = b"()<>[]{}/%"


@dataclass(frozen=True)
class Ref:
    num: int
    gen: int


@dataclass
class Stream:
    attrs: dict
    raw: bytes


class _Lexer:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def _skip_ws(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = self.data[self.pos]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == 0x25:  # % comment
                end = data.find(b"\n", self.pos)
                self.pos = n if end < 0 else end + 1
            else:
                return

    def peek_bytes(self, n: int) -> bytes:
        return self.data[self.pos:self.pos + n]

    def read_token(self) -> bytes:
        self._skip_ws()
        if self.pos >= len(self.data):
            raise CorruptFile("unexpected end of PDF data")
        c = self.data[self.pos]
        if c in b"<>":
            two = self.data[self.pos:self.pos + 2]
            if two in (b"<<", b">>"):
                self.pos += 2
                return two
            self.pos += 1
            return bytes([c])
        if c in _DELIMS:
            self.pos += 1
            return bytes([c])
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos] not in _WHITESPACE + _DELIMS:
            self.pos += 1
        return self.data[start:self.pos]

    def read_value(self):
        self._skip_ws()
        c = self.data[self.pos:self.pos + 1]
        if c == b"/":
            self.pos += 1
            return "/" + self._read_name()
        if c == b"(":
            return self._read_string()
        if c == b"<":
            if self.peek_bytes(2) == b"<<":
                return self._read_dict()
            return self._read_hex_string()
        if c == b"[":
            self.pos += 1
            out = []
            while True:
                self._skip_ws()
                if self.peek_bytes(1) == b"]":
                    self.pos += 1
                    return out
                out.append(self.read_value())
        token = self.read_token()
        if token == b"true":
            return True
        if token == b"false":
            return False
        if token == b"null":
            return None
        try:
            value = int(token)
        except ValueError:
            try:
                return float(token)
            except ValueError:
                return token.decode("latin-1")  # bare keyword
        # possible indirect reference: <num> <gen> R
        save = self.pos
        self._skip_ws()
        m = re.match(rb"(\d+)\s+R", self.data[self.pos:self.pos + 24])
        if m:
            probe = _Lexer(self.data, self.pos)
            gen_tok = probe.read_token()
            r_tok = probe.read_token()
            if r_tok == b"R" and gen_tok.isdigit():
                self.pos = probe.pos
                return Ref(value, int(gen_tok))
        self.pos = save
        return value

    def _read_name(self) -> str:
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos] not in _WHITESPACE + _DELIMS:
            self.pos += 1
        raw = self.data[start:self.pos]
        return re.sub(rb"#([0-9A-Fa-f]{2})", lambda m: bytes([int(m.group(1), 16)]), raw).decode("latin-1")

    def _read_string(self) -> bytes:
        self.pos += 1
        out = bytearray()
        depth = 1
        while self.pos < len(self.data):
            c = self.data[self.pos]
            self.pos += 1
            if c == 0x5C:  # backslash
                e = self.data[self.pos]
                self.pos += 1
                mapping = {0x6E: 10, 0x72: 13, 0x74: 9, 0x62: 8, 0x66: 12}
                out.append(mapping.get(e, e))
            elif c == 0x28:
                depth += 1
                out.append(c)
            elif c == 0x29:
                depth -= 1
                if depth == 0:
                    return bytes(out)
                out.append(c)
            else:
                out.append(c)
        raise CorruptFile("unterminated string")

    def _read_hex_string(self) -> bytes:
        self.pos += 1
        end = self.data.find(b">", self.pos)
        if end < 0:
            raise CorruptFile("unterminated hex string")
        hexstr = re.sub(rb"\s", b"", self.data[self.pos:end])
        self.pos = end + 1
        if len(hexstr) % 2:
            hexstr += b"0"
        return bytes.fromhex(hexstr.decode("ascii"))

    def _read_dict(self) -> dict:
        self.pos += 2
        out = {}
        while True:
            self._skip_ws()
            if self.peek_bytes(2) == b">>":
                self.pos += 2
                return out
            key = self.read_value()
            if not isinstance(key, str) or not key.startswith("/"):
                raise CorruptFile(f"dictionary key is not a name: {key!r}")
            out[key[1:]] = self.read_value()


class PdfDocument:
    def __init__(self, data: bytes):
        if not data.startswith(b"%PDF-"):
            raise CorruptFile("missing %PDF header")
        self.data = data
        self._cache: dict[int, object] = {}
        try:
            self.offsets = self._parse_xref_chain()
        except Exception:
            self.offsets = {}
        if not self.offsets:
            self.offsets = self._rescue_scan()
        if not self.offsets:
            raise CorruptFile("no objects found")
        self.pages = self._collect_pages()

    # -- object table ------------------------------------------------------
    def _parse_xref_chain(self) -> dict[int, int]:
        tail = self.data[-256:]
        m = re.search(rb"startxref\s+(\d+)", tail)
        if not m:
            raise CorruptFile("missing startxref")
        offsets: dict[int, int] = {}
        pos = int(m.group(1))
        seen = set()
        while pos not in seen:
            seen.add(pos)
            lex = _Lexer(self.data, pos)
            if lex.read_token() != b"xref":
                raise CorruptFile("xref stream tables are not supported")
            while True:
                lex._skip_ws()
                if lex.peek_bytes(7) == b"trailer":
                    lex.pos += 7
                    break
                start = int(lex.read_token())
                count = int(lex.read_token())
                lex._skip_ws()
                for i in range(count):
                    entry = self.data[lex.pos:lex.pos + 20]
                    lex.pos += 20
                    if entry[17:18] == b"n" and (start + i) not in offsets:
                        offsets.setdefault(start + i, int(entry[:10]))
            trailer = lex.read_value()
            if "Prev" in trailer:
                pos = int(trailer["Prev"])
            else:
                break
        return offsets

    def _rescue_scan(self) -> dict[int, int]:
        offsets: dict[int, int] = {}
        for m in re.finditer(rb"(?m)^\s*(\d+)\s+\d+\s+obj\b", self.data):
            offsets[int(m.group(1))] = m.start()  # later definitions win
        return offsets

    def resolve(self, value, depth: int = 0):
        if depth > 32:
            raise CorruptFile("reference cycle")
        if isinstance(value, Ref):
            return self.resolve(self._load(value.num), depth + 1)
        return value

    def _load(self, num: int):
        if num in self._cache:
            return self._cache[num]
        if num not in self.offsets:
            raise CorruptFile(f"missing object {num}")
        lex = _Lexer(self.data, self.offsets[num])
        lex.read_token()  # num
        lex.read_token()  # gen
        if lex.read_token() != b"obj":
            raise CorruptFile(f"object {num} not at recorded offset")
        value = lex.read_value()
        lex._skip_ws()
        if lex.peek_bytes(6) == b"stream":
            lex.pos += 6
            if self.data[lex.pos:lex.pos + 2] == b"\r\n":
                lex.pos += 2
            elif self.data[lex.pos:lex.pos + 1] == b"\n":
                lex.pos += 1
            length = self.resolve(value.get("Length"))
            if not isinstance(length, int):
                raise CorruptFile("stream without integer /Length")
            raw = self.data[lex.pos:lex.pos + length]
            value = Stream(value, raw)
        self._cache[num] = value
        return value

    # -- filters -----------------------------------------------------------
    def stream_data(self, stream: Stream) -> bytes:
        filters = self.resolve(stream.attrs.get("Filter"))
        if filters is None:
            filters = []
        elif not isinstance(filters, list):
            filters = [filters]
        parms = self.resolve(stream.attrs.get("DecodeParms"))
        data = stream.raw
        for f in filters:
            f = self.resolve(f)
            if f == "/FlateDecode":
                try:
                    data = zlib.decompress(data)
                except zlib.error as exc:
                    raise CorruptFile(f"bad Flate stream: {exc}") from exc
            elif f == "/ASCIIHexDecode":
                cleaned = re.sub(rb"[\s>]", b"", data)
                if len(cleaned) % 2:
                    cleaned += b"0"
                data = bytes.fromhex(cleaned.decode("ascii"))
            elif f == "/DCTDecode":
                return data  # consumed as JPEG by the image path
            else:
                raise CorruptFile(f"unsupported stream filter {f}")
        if isinstance(parms, dict) and self.resolve(parms.get("Predictor", 1)) not in (None, 1):
            raise CorruptFile("predictor-coded streams are not supported")
        return data

    # -- page tree ---------------------------------------------------------
    def _collect_pages(self) -> list[dict]:
        root = None
        trailer_root = self._find_trailer_root()
        if trailer_root is not None:
            root = self.resolve(trailer_root)
        if root is None:
            for num in sorted(self.offsets):
                try:
                    obj = self.resolve(Ref(num, 0))
                except CorruptFile:
                    continue
                if isinstance(obj, dict) and obj.get("Type") == "/Catalog":
                    root = obj
                    break
        if not isinstance(root, dict) or "Pages" not in root:
            raise CorruptFile("no page tree")
        pages: list[dict] = []
        inheritable = ("MediaBox", "Resources", "Rotate")

        def walk(node_ref, inherited, depth=0):
            if depth > 64:
                raise CorruptFile("page tree too deep")
            node = self.resolve(node_ref)
            if not isinstance(node, dict):
                raise CorruptFile("malformed page tree node")
            scope = dict(inherited)
            for key in inheritable:
                if key in node:
                    scope[key] = node[key]
            if node.get("Type") == "/Page" or ("Kids" not in node and node.get("Type") != "/Pages"):
                page = dict(node)
                for key, val in scope.items():
                    page.setdefault(key, val)
                pages.append(page)
                return
            for kid in self.resolve(node.get("Kids", [])):
                walk(kid, scope, depth + 1)

        walk(root["Pages"], {})
        return pages

    def _find_trailer_root(self):
        for m in re.finditer(rb"trailer", self.data):
            try:
                lex = _Lexer(self.data, m.end())
                trailer = lex.read_value()
                if isinstance(trailer, dict) and "Root" in trailer:
                    return trailer["Root"]
            except Exception:
                continue
        return None


# ---------------------------------------------------------------------------
# rendering


@dataclass
class _GState:
    ctm: np.ndarray
    fill: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def copy(self) -> "_GState":
        return _GState(self.ctm.copy(), self.fill)


def _matrix(a, b, c, d, e, f) -> np.ndarray:
    return np.array([[a, b, 0.0], [c, d, 0.0], [e, f, 1.0]], dtype=np.float64)


def _apply(ctm: np.ndarray, x, y) -> tuple[float, float]:
    return (
        ctm[0, 0] * x + ctm[1, 0] * y + ctm[2, 0],
        ctm[0, 1] * x + ctm[1, 1] * y + ctm[2, 1],
    )


class _PageRenderer:
    def __init__(self, doc: PdfDocument, page: dict, dpi: int):
        self.doc = doc
        box = [float(doc.resolve(v)) for v in doc.resolve(page.get("MediaBox", [0, 0, 612, 792]))]
        self.box = box
        scale = dpi / 72.0
        self.width = max(1, round((box[2] - box[0]) * scale))
        self.height = max(1, round((box[3] - box[1]) * scale))
        # user space -> device: translate to box origin, scale, flip y
        self.base = _matrix(scale, 0, 0, -scale, -box[0] * scale, box[3] * scale)
        self.canvas = np.full((self.height, self.width, 3), 255, dtype=np.uint8)
        self.page = page

    def render(self) -> np.ndarray:
        contents = self.doc.resolve(self.page.get("Contents"))
        chunks = []
        items = contents if isinstance(contents, list) else [contents] if contents else []
        for item in items:
            stream = self.doc.resolve(item)
            if isinstance(stream, Stream):
                chunks.append(self.doc.stream_data(stream))
        resources = self.doc.resolve(self.page.get("Resources", {})) or {}
        self._run(b"\n".join(chunks), resources)
        return self.canvas

    def _run(self, content: bytes, resources: dict) -> None:
        lex = _Lexer(content)
        state = _GState(self.base.copy())
        stack: list[_GState] = []
        operands: list = []
        rect_path: list[tuple] = []
        xobjects = self.doc.resolve(resources.get("XObject", {})) or {}

        def floats(n):
            try:
                return [float(v) for v in operands[-n:]]
            except (TypeError, ValueError):
                return None

        while True:
            lex._skip_ws()
            if lex.pos >= len(content):
                return
            value = lex.read_value()
            if not isinstance(value, str) or value.startswith("/"):
                operands.append(value)
                continue
            op = value
            if op == "q":
                stack.append(state.copy())
            elif op == "Q" and stack:
                state = stack.pop()
            elif op == "cm" and len(operands) >= 6 and (vals := floats(6)):
                state.ctm = _matrix(*vals) @ state.ctm
            elif op == "rg" and len(operands) >= 3 and (vals := floats(3)):
                state.fill = tuple(vals)
            elif op == "g" and operands and (vals := floats(1)):
                state.fill = (vals[0], vals[0], vals[0])
            elif op == "k" and len(operands) >= 4 and (vals := floats(4)):
                c, m, y, k = vals
                state.fill = (max(0.0, 1 - min(1, c + k)), max(0.0, 1 - min(1, m + k)),
                              max(0.0, 1 - min(1, y + k)))
            elif op == "re" and len(operands) >= 4 and (vals := floats(4)):
                rect_path.append(tuple(vals))
            elif op in ("f", "F", "f*", "b", "B", "b*", "B*"):
                for rect in rect_path:
                    self._fill_rect(state, *rect)
                rect_path = []
            elif op in ("n", "S", "s"):
                rect_path = []
            elif op == "Do" and operands:
                target = self.doc.resolve(xobjects.get(str(operands[-1])[1:]))
                if isinstance(target, Stream):
                    self._draw_xobject(state, target)
            elif op == "BI":
                # inline images are unsupported: skip to EI to stay in sync
                end = content.find(b"EI", lex.pos)
                lex.pos = len(content) if end < 0 else end + 2
            operands = []

    def _fill_rect(self, state: _GState, x, y, w, h) -> None:
        corners = [_apply(state.ctm, px, py) for px, py in
                   ((x, y), (x + w, y), (x + w, y + h), (x, y + h))]
        xs = [c[0] for c in corners]
        ys = [c[1] for c in corners]
        x0 = max(0, int(np.floor(min(xs))))
        x1 = min(self.width, int(np.ceil(max(xs))))
        y0 = max(0, int(np.floor(min(ys))))
        y1 = min(self.height, int(np.ceil(max(ys))))
        if x1 <= x0 or y1 <= y0:
            return
        color = np.clip(np.array(state.fill) * 255, 0, 255).astype(np.uint8)
        axis_aligned = abs(state.ctm[0, 1]) < 1e-9 and abs(state.ctm[1, 0]) < 1e-9
        if axis_aligned:
            self.canvas[y0:y1, x0:x1] = color
            return
        yy, xx = np.mgrid[y0:y1, x0:x1]
        inside = np.ones(yy.shape, dtype=bool)
        pts = corners + [corners[0]]
        for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
            cross = (bx - ax) * (yy + 0.5 - ay) - (by - ay) * (xx + 0.5 - ax)
            inside &= cross <= 0 if _signed(corners) < 0 else cross >= 0
        self.canvas[y0:y1, x0:x1][inside] = color

    def _draw_xobject(self, state: _GState, stream: Stream) -> None:
        attrs = {k: self.doc.resolve(v) for k, v in stream.attrs.items()}
        if attrs.get("Subtype") != "/Image":
            return  # form xobjects carry vector content; nothing to draw
        arr = self._decode_image(stream, attrs)
        if arr is None:
            return
        ih, iw = arr.shape[:2]
        corners = [_apply(state.ctm, u, v) for u, v in ((0, 0), (1, 0), (1, 1), (0, 1))]
        xs = [c[0] for c in corners]
        ys = [c[1] for c in corners]
        x0 = max(0, int(np.floor(min(xs))))
        x1 = min(self.width, int(np.ceil(max(xs))))
        y0 = max(0, int(np.floor(min(ys))))
        y1 = min(self.height, int(np.ceil(max(ys))))
        if x1 <= x0 or y1 <= y0:
            return
        inv = np.linalg.inv(state.ctm)
        yy, xx = np.mgrid[y0:y1, x0:x1]
        u = inv[0, 0] * (xx + 0.5) + inv[1, 0] * (yy + 0.5) + inv[2, 0]
        v = inv[0, 1] * (xx + 0.5) + inv[1, 1] * (yy + 0.5) + inv[2, 1]
        inside = (u >= 0) & (u < 1) & (v >= 0) & (v < 1)
        sx = np.clip((u * iw).astype(np.int64), 0, iw - 1)
        sy = np.clip(((1.0 - v) * ih).astype(np.int64), 0, ih - 1)
        region = self.canvas[y0:y1, x0:x1]
        region[inside] = arr[sy[inside], sx[inside]]

    def _decode_image(self, stream: Stream, attrs: dict) -> np.ndarray | None:
        filters = attrs.get("Filter")
        filters = [filters] if isinstance(filters, str) else (filters or [])
        if "/DCTDecode" in filters:
            from PIL import Image

            try:
                img = Image.open(io.BytesIO(stream.raw)).convert("RGB")
            except Exception as exc:
                raise CorruptFile(f"bad JPEG image: {exc}") from exc
            return np.asarray(img, dtype=np.uint8)
        data = self.doc.stream_data(stream)
        width = int(attrs.get("Width", 0))
        height = int(attrs.get("Height", 0))
        bits = int(attrs.get("BitsPerComponent", 8))
        if width < 1 or height < 1:
            return None
        colorspace = attrs.get("ColorSpace")
        if bits != 8:
            raise CorruptFile(f"unsupported image depth {bits}")
        if colorspace == "/DeviceRGB":
            if len(data) < width * height * 3:
                raise CorruptFile("truncated RGB image data")
            return np.frombuffer(data[:width * height * 3], dtype=np.uint8).reshape(height, width, 3)
        if colorspace == "/DeviceGray":
            if len(data) < width * height:
                raise CorruptFile("truncated gray image data")
            gray = np.frombuffer(data[:width * height], dtype=np.uint8).reshape(height, width)
            return np.repeat(gray[:, :, None], 3, axis=2)
        raise CorruptFile(f"unsupported image color space {colorspace}")


def _signed(corners) -> float:
    s = 0.0
    for (ax, ay), (bx, by) in zip(corners, corners[1:] + [corners[0]]):
        s += ax * by - bx * ay
    return s


def page_count(data: bytes) -> int:
    return len(PdfDocument(data).pages)


def rasterize_page(data: bytes, page_index: int, dpi: int) -> PageImage:
    """Rasterize one page; deterministic for fixed (bytes, index, dpi)."""
    doc = PdfDocument(data)
    if not doc.pages:
        raise PageOutOfRange("document has no pages")
    if not 0 <= page_index < len(doc.pages):
        raise PageOutOfRange(f"page {page_index} of {len(doc.pages)}")
    canvas = _PageRenderer(doc, doc.pages[page_index], dpi).render()
    return PageImage.from_array(canvas, dpi=dpi)
