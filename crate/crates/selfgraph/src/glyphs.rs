//! The glyphed side of the equation notion: a pixel font assigning each of
//! the 47 alphabet symbols a set of grid-aligned pixels inside the unit
//! square, extension of glyphs to strings by unit right-translation, and
//! rasterization to bitmaps.
//!
//! Pixel coordinates are (column, row) with rows increasing upward; pixel
//! (c, r) at resolution `G` denotes the closed square
//! `[c/G, (c+1)/G] x [r/G, (r+1)/G]`. Pixel-set equality is equality of the
//! cell sets, not of the underlying point sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;

use thiserror::Error;

/// Number of symbols in the alphabet: 26 letters, 10 digits, two
/// parentheses, six operators, three infinite-product symbols.
pub const ALPHABET_SIZE: u32 = 47;

/// Display characters in canonical order: a..z, 0..9, ( ) + · − / ^ = Π _ ∞.
const DISPLAY: [char; 47] = [
    'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'p', 'q', 'r',
    's', 't', 'u', 'v', 'w', 'x', 'y', 'z', '0', '1', '2', '3', '4', '5', '6', '7', '8', '9',
    '(', ')', '+', '·', '−', '/', '^', '=', 'Π', '_', '∞',
];

/// Names used in font files for the non-alphanumeric symbols.
const NAMES: [&str; 11] = [
    "lparen",
    "rparen",
    "plus",
    "cdot",
    "minus",
    "slash",
    "caret",
    "equals",
    "pi",
    "underscore",
    "infinity",
];

/// One of the 47 alphabet members, identified by its canonical index 0..=46.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u8);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown symbol {found:?} at position {position}")]
pub struct UnknownSymbol {
    pub found: char,
    pub position: usize,
}

impl Symbol {
    pub fn from_index(i: u8) -> Option<Symbol> {
        (i < ALPHABET_SIZE as u8).then_some(Symbol(i))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Symbol> {
        (0..ALPHABET_SIZE as u8).map(Symbol)
    }

    pub fn display_char(self) -> char {
        DISPLAY[self.0 as usize]
    }

    /// Symbol for a display character. Accepts the ASCII aliases `*` for `·`
    /// and `-` for `−` on input; they are never emitted.
    pub fn from_char(c: char) -> Option<Symbol> {
        let c = match c {
            '*' => '·',
            '-' => '−',
            _ => c,
        };
        DISPLAY.iter().position(|&d| d == c).map(|i| Symbol(i as u8))
    }

    /// Parse a display string symbol-by-symbol (single-char aliases only).
    pub fn parse_str(text: &str) -> Result<Vec<Symbol>, UnknownSymbol> {
        text.chars()
            .enumerate()
            .map(|(position, c)| Symbol::from_char(c).ok_or(UnknownSymbol { found: c, position }))
            .collect()
    }

    pub fn display_string(syms: &[Symbol]) -> String {
        syms.iter().map(|s| s.display_char()).collect()
    }

    /// Name used in font files: the character itself for letters and digits,
    /// a spelled-out name otherwise.
    pub fn file_name(self) -> String {
        let i = self.0 as usize;
        if i < 36 {
            DISPLAY[i].to_string()
        } else {
            NAMES[i - 36].to_string()
        }
    }

    pub fn from_file_name(name: &str) -> Option<Symbol> {
        if name.chars().count() == 1 {
            let c = name.chars().next().unwrap();
            if c.is_ascii_lowercase() || c.is_ascii_digit() {
                return Symbol::from_char(c);
            }
        }
        NAMES
            .iter()
            .position(|&n| n == name)
            .map(|i| Symbol((i + 36) as u8))
    }

    /// Digit value 1..=47 used by the Gödel numbering.
    pub fn digit_value(self) -> u32 {
        self.0 as u32 + 1
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_char())
    }
}

/// A finite set of grid-aligned pixels at a fixed resolution (pixels per
/// unit). Columns may exceed `G` after right-translation; single-symbol
/// glyphs always stay within `0..G` on both axes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelSet {
    pub resolution: u32,
    pub pixels: BTreeSet<(i64, i64)>,
}

impl PixelSet {
    pub fn empty(resolution: u32) -> PixelSet {
        PixelSet {
            resolution,
            pixels: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn contains(&self, col: i64, row: i64) -> bool {
        self.pixels.contains(&(col, row))
    }

    pub fn union(&self, other: &PixelSet) -> PixelSet {
        assert_eq!(self.resolution, other.resolution, "resolution mismatch");
        PixelSet {
            resolution: self.resolution,
            pixels: self.pixels.union(&other.pixels).copied().collect(),
        }
    }
}

/// Translate a pixel set to the right by `r` whole units: every column
/// increases by `r * G`. Points `(x, y)` of the underlying set map to
/// `(x + r, y)`.
pub fn shift_right(s: &PixelSet, r: u64) -> PixelSet {
    let dx = r as i64 * s.resolution as i64;
    PixelSet {
        resolution: s.resolution,
        pixels: s.pixels.iter().map(|&(c, row)| (c + dx, row)).collect(),
    }
}

/// A pixel font: a glyph for every one of the 47 symbols, all at one
/// resolution, each nonempty and contained in the unit square.
#[derive(Debug, Clone)]
pub struct Font {
    resolution: u32,
    glyphs: BTreeMap<Symbol, PixelSet>,
}

#[derive(Debug, Error)]
pub enum FontError {
    #[error("font parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("font is missing symbol {0:?}")]
    MissingSymbol(String),
    #[error("symbol {symbol:?} defined twice (line {line})")]
    DuplicateSymbol { symbol: String, line: usize },
    #[error("symbol {symbol:?} has an empty glyph")]
    EmptyGlyph { symbol: String },
    #[error("symbol {symbol:?} has pixel ({col},{row}) outside [0,{g})x[0,{g})")]
    OutOfSquare {
        symbol: String,
        col: i64,
        row: i64,
        g: u32,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Font {
    pub fn new(resolution: u32, glyphs: BTreeMap<Symbol, PixelSet>) -> Result<Font, FontError> {
        for sym in Symbol::all() {
            let glyph = glyphs
                .get(&sym)
                .ok_or_else(|| FontError::MissingSymbol(sym.file_name()))?;
            if glyph.is_empty() {
                return Err(FontError::EmptyGlyph {
                    symbol: sym.file_name(),
                });
            }
            for &(col, row) in &glyph.pixels {
                if col < 0 || row < 0 || col >= resolution as i64 || row >= resolution as i64 {
                    return Err(FontError::OutOfSquare {
                        symbol: sym.file_name(),
                        col,
                        row,
                        g: resolution,
                    });
                }
            }
        }
        Ok(Font { resolution, glyphs })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn glyph(&self, sym: Symbol) -> &PixelSet {
        &self.glyphs[&sym]
    }

    /// The built-in test font at G=8: every symbol a distinct pattern inside
    /// a 5x7 box (two anchor pixels plus the bits of index+1).
    pub fn builtin_g8() -> Font {
        load_font(std::io::Cursor::new(FONT_G8)).expect("embedded G=8 font is valid")
    }

    /// The built-in display font at G=100, with the `+` glyph exactly the
    /// full-height column 50 union full-width row 50.
    pub fn builtin_g100() -> Font {
        load_font(std::io::Cursor::new(FONT_G100)).expect("embedded G=100 font is valid")
    }
}

pub const FONT_G8: &str = include_str!("fonts/g8.font");
pub const FONT_G100: &str = include_str!("fonts/g100.font");

/// Write a string on the plane: the union of each character's glyph
/// translated right by its position. The empty string maps to the empty set.
pub fn glyph_of_string(s: &[Symbol], font: &Font) -> PixelSet {
    let mut out = PixelSet::empty(font.resolution());
    for (i, sym) in s.iter().enumerate() {
        let shifted = shift_right(font.glyph(*sym), i as u64);
        out.pixels.extend(shifted.pixels);
    }
    out
}

/// Integer-unit window on the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Window {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Window {
        assert!(x1 > x0 && y1 > y0, "window must be nonempty");
        Window { x0, y0, x1, y1 }
    }

    pub fn unit() -> Window {
        Window::new(0, 0, 1, 1)
    }
}

/// Binary image: one bit per pixel at resolution `g` per unit, row 0 at the
/// bottom of the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    pub width: usize,
    pub height: usize,
    pub g: u32,
    pub window: Window,
    bits: Vec<bool>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("window of {requested} pixels exceeds the budget of {budget}")]
pub struct WindowTooLarge {
    pub requested: u128,
    pub budget: u128,
}

impl Bitmap {
    pub fn new(window: Window, g: u32, budget: u128) -> Result<Bitmap, WindowTooLarge> {
        let width = (window.x1 - window.x0) as u128 * g as u128;
        let height = (window.y1 - window.y0) as u128 * g as u128;
        let requested = width * height;
        if requested > budget {
            return Err(WindowTooLarge { requested, budget });
        }
        Ok(Bitmap {
            width: width as usize,
            height: height as usize,
            g,
            window,
            bits: vec![false; (width * height) as usize],
        })
    }

    /// Pixel coordinates here are window-relative: (0,0) is the bottom-left
    /// pixel of the window.
    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, v: bool) {
        self.bits[row * self.width + col] = v;
    }

    pub fn count_lit(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Serialize as PBM P1, top row first, 64 raster characters per line.
    pub fn to_pbm(&self) -> String {
        let mut out = String::with_capacity(self.bits.len() + self.bits.len() / 64 + 32);
        out.push_str(&format!("P1\n{} {}\n", self.width, self.height));
        let mut on_line = 0;
        for row in (0..self.height).rev() {
            for col in 0..self.width {
                out.push(if self.get(col, row) { '1' } else { '0' });
                on_line += 1;
                if on_line == 64 {
                    out.push('\n');
                    on_line = 0;
                }
            }
        }
        if on_line > 0 {
            out.push('\n');
        }
        out
    }

    /// Minimal PNG encoding (grayscale, lit pixels black), for optional
    /// human-friendly output next to the canonical PBM.
    pub fn to_png(&self) -> Vec<u8> {
        crate::glyphs::png::encode(self)
    }
}

/// Default pixel budget for rasterization (enough for the full G=8 build).
pub const DEFAULT_PIXEL_BUDGET: u128 = 1 << 32;

/// Render the pixel set within the window: a bitmap pixel is lit iff its
/// absolute (col, row) cell is in the set.
pub fn rasterize(s: &PixelSet, window: Window, budget: u128) -> Result<Bitmap, WindowTooLarge> {
    let g = s.resolution;
    let mut bmp = Bitmap::new(window, g, budget)?;
    let col0 = window.x0 * g as i64;
    let row0 = window.y0 * g as i64;
    for &(c, r) in &s.pixels {
        let (dc, dr) = (c - col0, r - row0);
        if dc >= 0 && dr >= 0 && (dc as usize) < bmp.width && (dr as usize) < bmp.height {
            bmp.set(dc as usize, dr as usize, true);
        }
    }
    Ok(bmp)
}

/// Parse a font from the plain-text format: a `G <int>` line, then for each
/// symbol a `sym <name> <col-offset> <row-offset>` header followed by rows of
/// `.`/`#` listed top to bottom (the bottom row sits at the row offset).
pub fn load_font<R: BufRead>(reader: R) -> Result<Font, FontError> {
    let mut resolution: Option<u32> = None;
    let mut glyphs: BTreeMap<Symbol, PixelSet> = BTreeMap::new();
    let mut current: Option<(Symbol, i64, i64, Vec<String>, usize)> = None;

    let parse_err = |line: usize, message: String| FontError::Parse { line, message };

    let finish =
        |cur: &mut Option<(Symbol, i64, i64, Vec<String>, usize)>,
         glyphs: &mut BTreeMap<Symbol, PixelSet>,
         resolution: u32|
         -> Result<(), FontError> {
            if let Some((sym, col_off, row_off, rows, _line)) = cur.take() {
                let mut pixels = BTreeSet::new();
                let height = rows.len() as i64;
                for (i, row_text) in rows.iter().enumerate() {
                    // Row i counts from the top; the bottom row is at row_off.
                    let row = row_off + (height - 1 - i as i64);
                    for (j, ch) in row_text.chars().enumerate() {
                        if ch == '#' {
                            pixels.insert((col_off + j as i64, row));
                        }
                    }
                }
                let prev = glyphs.insert(
                    sym,
                    PixelSet {
                        resolution,
                        pixels,
                    },
                );
                if prev.is_some() {
                    return Err(FontError::DuplicateSymbol {
                        symbol: sym.file_name(),
                        line: 0,
                    });
                }
            }
            Ok(())
        };

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim_end();

        if text.is_empty() || text.starts_with('#') && current.is_none() {
            // Comments are only recognized outside glyph rows ('#' is a pixel).
            if text.is_empty() {
                continue;
            }
        }
        if resolution.is_none() {
            let mut parts = text.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some("G"), Some(num)) => {
                    let g: u32 = num
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad resolution {num:?}")))?;
                    if g == 0 {
                        return Err(parse_err(lineno, "resolution must be positive".into()));
                    }
                    resolution = Some(g);
                    continue;
                }
                _ => {
                    return Err(parse_err(
                        lineno,
                        format!("expected `G <int>` header, found {text:?}"),
                    ))
                }
            }
        }
        let g = resolution.unwrap();
        if let Some(rest) = text.strip_prefix("sym ") {
            finish(&mut current, &mut glyphs, g)?;
            let mut parts = rest.split_whitespace();
            let name = parts
                .next()
                .ok_or_else(|| parse_err(lineno, "missing symbol name".into()))?;
            let sym = Symbol::from_file_name(name)
                .ok_or_else(|| parse_err(lineno, format!("unknown symbol name {name:?}")))?;
            if glyphs.contains_key(&sym) {
                return Err(FontError::DuplicateSymbol {
                    symbol: name.to_string(),
                    line: lineno,
                });
            }
            let col_off: i64 = parts
                .next()
                .unwrap_or("0")
                .parse()
                .map_err(|_| parse_err(lineno, "bad column offset".into()))?;
            let row_off: i64 = parts
                .next()
                .unwrap_or("0")
                .parse()
                .map_err(|_| parse_err(lineno, "bad row offset".into()))?;
            current = Some((sym, col_off, row_off, Vec::new(), lineno));
        } else if !text.is_empty() {
            match &mut current {
                Some((_, _, _, rows, _)) => {
                    if text.chars().any(|c| c != '.' && c != '#') {
                        return Err(parse_err(
                            lineno,
                            format!("glyph rows may only contain `.` and `#`, found {text:?}"),
                        ));
                    }
                    rows.push(text.to_string());
                }
                None => {
                    return Err(parse_err(
                        lineno,
                        format!("expected `sym <name> <col> <row>`, found {text:?}"),
                    ))
                }
            }
        }
    }
    let g = resolution.ok_or_else(|| parse_err(0, "empty font file".into()))?;
    finish(&mut current, &mut glyphs, g)?;
    Font::new(g, glyphs)
}

mod png {
    //! Tiny PNG writer: 1-bit-per-pixel content stored as 8-bit grayscale,
    //! uncompressed deflate blocks. Enough for visual inspection.

    use super::Bitmap;

    fn crc32(data: &[u8]) -> u32 {
        let mut table = [0u32; 256];
        for (n, entry) in table.iter_mut().enumerate() {
            let mut c = n as u32;
            for _ in 0..8 {
                c = if c & 1 != 0 { 0xEDB88320 ^ (c >> 1) } else { c >> 1 };
            }
            *entry = c;
        }
        let mut crc = 0xFFFF_FFFFu32;
        for &b in data {
            crc = table[((crc ^ b as u32) & 0xFF) as usize] ^ (crc >> 8);
        }
        crc ^ 0xFFFF_FFFF
    }

    fn adler32(data: &[u8]) -> u32 {
        let (mut a, mut b) = (1u32, 0u32);
        for &byte in data {
            a = (a + byte as u32) % 65521;
            b = (b + a) % 65521;
        }
        (b << 16) | a
    }

    fn chunk(out: &mut Vec<u8>, kind: &[u8; 4], data: &[u8]) {
        out.extend_from_slice(&(data.len() as u32).to_be_bytes());
        out.extend_from_slice(kind);
        out.extend_from_slice(data);
        let mut crc_input = kind.to_vec();
        crc_input.extend_from_slice(data);
        out.extend_from_slice(&crc32(&crc_input).to_be_bytes());
    }

    pub fn encode(bmp: &Bitmap) -> Vec<u8> {
        let (w, h) = (bmp.width, bmp.height);
        let mut raw = Vec::with_capacity(h * (w + 1));
        for row in (0..h).rev() {
            raw.push(0u8); // filter: none
            for col in 0..w {
                raw.push(if bmp.get(col, row) { 0 } else { 255 });
            }
        }
        // zlib stream with stored (uncompressed) deflate blocks.
        let mut z = vec![0x78, 0x01];
        let mut rest = raw.as_slice();
        loop {
            let take = rest.len().min(65535);
            let last = take == rest.len();
            z.push(if last { 1 } else { 0 });
            z.extend_from_slice(&(take as u16).to_le_bytes());
            z.extend_from_slice(&(!(take as u16)).to_le_bytes());
            z.extend_from_slice(&rest[..take]);
            if last {
                break;
            }
            rest = &rest[take..];
        }
        z.extend_from_slice(&adler32(&raw).to_be_bytes());

        let mut out = vec![0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];
        let mut ihdr = Vec::new();
        ihdr.extend_from_slice(&(w as u32).to_be_bytes());
        ihdr.extend_from_slice(&(h as u32).to_be_bytes());
        ihdr.extend_from_slice(&[8, 0, 0, 0, 0]); // 8-bit grayscale
        chunk(&mut out, b"IHDR", &ihdr);
        chunk(&mut out, b"IDAT", &z);
        chunk(&mut out, b"IEND", &[]);
        out
    }
}
