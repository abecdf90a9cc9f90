//! Deterministic maze rasterization and the line-drawing image update.
//!
//! Rendering is pure integer geometry over an RGBA buffer: no anti-aliasing,
//! no floating point, so content hashes are stable across platforms. The
//! overlay operator produces a new image from a base image plus a path
//! prefix, which is how trajectory frames (one per reasoning step) are built.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::hash::sha256_hex;
use crate::maze::{Cell, Maze, Path};

pub type Color = [u8; 4];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("invalid render spec: {0}")]
    InvalidSpec(String),
    #[error("cell {cell} is outside the {n}x{n} grid")]
    InvalidCell { cell: Cell, n: u32 },
    #[error("pixel ({x}, {y}) is outside the grid area")]
    OutOfGrid { x: u32, y: u32 },
    #[error("overlay prefix cells {0} and {1} are not adjacent")]
    InvalidPath(Cell, Cell),
}

/// Named colors for every painted element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    pub background: Color,
    pub wall: Color,
    pub start: Color,
    pub end: Color,
    pub path: Color,
}

impl Default for Palette {
    fn default() -> Self {
        Self {
            background: [255, 255, 255, 255],
            wall: [0, 0, 0, 255],
            start: [0, 160, 60, 255],
            end: [200, 30, 30, 255],
            path: [40, 90, 220, 255],
        }
    }
}

/// Pixel geometry for maze renders. The committed default (40px cells, 2px
/// walls, 10px margin) is what golden hashes and dataset images use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub cell_px: u32,
    pub wall_px: u32,
    pub margin_px: u32,
    pub palette: Palette,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            cell_px: 40,
            wall_px: 2,
            margin_px: 10,
            palette: Palette::default(),
        }
    }
}

impl RenderSpec {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.cell_px < 8 {
            return Err(RenderError::InvalidSpec(alloc::format!(
                "cell_px must be >= 8, got {}",
                self.cell_px
            )));
        }
        if self.wall_px < 1 {
            return Err(RenderError::InvalidSpec("wall_px must be >= 1".into()));
        }
        if self.margin_px < 1 {
            return Err(RenderError::InvalidSpec("margin_px must be >= 1".into()));
        }
        Ok(())
    }

    /// Side length in pixels of a rendered n×n maze.
    pub fn image_side(&self, n: u32) -> u32 {
        n * self.cell_px + 2 * self.margin_px
    }

    /// Path stroke thickness, derived so overlays stay visible at any scale.
    pub fn stroke_px(&self) -> u32 {
        (self.cell_px / 10).max(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct PixelPoint {
    pub x: u32,
    pub y: u32,
}

impl PixelPoint {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

impl From<(u32, u32)> for PixelPoint {
    fn from((x, y): (u32, u32)) -> Self {
        Self { x, y }
    }
}

impl From<PixelPoint> for (u32, u32) {
    fn from(p: PixelPoint) -> Self {
        (p.x, p.y)
    }
}

impl core::fmt::Display for PixelPoint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "[{}, {}]", self.x, self.y)
    }
}

/// An immutable RGBA8 raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32, fill: Color) -> Self {
        let mut pixels = Vec::with_capacity((width * height * 4) as usize);
        for _ in 0..width * height {
            pixels.extend_from_slice(&fill);
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    /// Wrap an existing RGBA8 buffer; `pixels.len()` must be `w * h * 4`.
    pub fn from_rgba8(width: u32, height: u32, pixels: Vec<u8>) -> Option<Self> {
        if pixels.len() == (width as usize) * (height as usize) * 4 {
            Some(Self {
                width,
                height,
                pixels,
            })
        } else {
            None
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> Color {
        let i = ((y * self.width + x) * 4) as usize;
        [
            self.pixels[i],
            self.pixels[i + 1],
            self.pixels[i + 2],
            self.pixels[i + 3],
        ]
    }

    fn set_pixel(&mut self, x: u32, y: u32, color: Color) {
        let i = ((y * self.width + x) * 4) as usize;
        self.pixels[i..i + 4].copy_from_slice(&color);
    }

    /// Fill an axis-aligned rectangle, clipped to the image bounds.
    fn fill_rect(&mut self, x0: i64, y0: i64, w: i64, h: i64, color: Color) {
        let x_lo = x0.max(0) as u32;
        let y_lo = y0.max(0) as u32;
        let x_hi = (x0 + w).clamp(0, self.width as i64) as u32;
        let y_hi = (y0 + h).clamp(0, self.height as i64) as u32;
        for y in y_lo..y_hi {
            for x in x_lo..x_hi {
                self.set_pixel(x, y, color);
            }
        }
    }

    /// Copy of the `w`×`h` region at `(x, y)`, or `None` if it exceeds the
    /// image bounds.
    pub fn crop(&self, x: u32, y: u32, w: u32, h: u32) -> Option<Image> {
        if x + w > self.width || y + h > self.height {
            return None;
        }
        let mut pixels = Vec::with_capacity((w * h * 4) as usize);
        for row in y..y + h {
            let start = ((row * self.width + x) * 4) as usize;
            pixels.extend_from_slice(&self.pixels[start..start + (w * 4) as usize]);
        }
        Some(Image {
            width: w,
            height: h,
            pixels,
        })
    }

    /// Paste `src` with its top-left corner at `(x, y)`. Returns `false`
    /// (leaving self unchanged) if it would not fit.
    pub fn blit(&mut self, x: u32, y: u32, src: &Image) -> bool {
        if x + src.width > self.width || y + src.height > self.height {
            return false;
        }
        for row in 0..src.height {
            let dst_start = (((y + row) * self.width + x) * 4) as usize;
            let src_start = ((row * src.width) * 4) as usize;
            let len = (src.width * 4) as usize;
            self.pixels[dst_start..dst_start + len]
                .copy_from_slice(&src.pixels[src_start..src_start + len]);
        }
        true
    }

    /// SHA-256 over little-endian dimensions and the raw RGBA buffer.
    pub fn content_hash(&self) -> String {
        sha256_hex([
            self.width.to_le_bytes().as_slice(),
            self.height.to_le_bytes().as_slice(),
            &self.pixels,
        ])
    }

    /// Number of pixels exactly matching `color`.
    pub fn count_pixels(&self, color: Color) -> usize {
        self.pixels.chunks_exact(4).filter(|px| *px == color).count()
    }
}

/// Integer pixel center of a cell: `margin + (col − ½)·cell_px` (and the
/// row analogue for y), with the half-cell offset floored for odd sizes.
pub fn cell_center(spec: &RenderSpec, n: u32, cell: Cell) -> Result<PixelPoint, RenderError> {
    if !(1..=n).contains(&cell.row) || !(1..=n).contains(&cell.col) {
        return Err(RenderError::InvalidCell { cell, n });
    }
    let x = spec.margin_px + cell.col * spec.cell_px - spec.cell_px / 2;
    let y = spec.margin_px + cell.row * spec.cell_px - spec.cell_px / 2;
    Ok(PixelPoint::new(x, y))
}

/// The cell whose square contains pixel `p`; errors for pixels in the
/// margin or beyond the grid area.
pub fn pixel_to_cell(spec: &RenderSpec, n: u32, p: PixelPoint) -> Result<Cell, RenderError> {
    let oob = RenderError::OutOfGrid { x: p.x, y: p.y };
    let dx = p.x.checked_sub(spec.margin_px).ok_or(oob.clone())?;
    let dy = p.y.checked_sub(spec.margin_px).ok_or(oob.clone())?;
    let col = dx / spec.cell_px;
    let row = dy / spec.cell_px;
    if col >= n || row >= n {
        return Err(oob);
    }
    Ok(Cell::new(row + 1, col + 1))
}

/// Render the maze: background, start/end markers, then walls (outer border
/// always, interior only where present). Pure function of its inputs.
pub fn render_maze(
    maze: &Maze,
    s: Cell,
    e: Cell,
    spec: &RenderSpec,
) -> Result<Image, RenderError> {
    spec.validate()?;
    let n = maze.n();
    for cell in [s, e] {
        if !maze.in_grid(cell) {
            return Err(RenderError::InvalidCell { cell, n });
        }
    }
    let side = spec.image_side(n);
    let mut img = Image::new(side, side, spec.palette.background);

    draw_marker(&mut img, spec, n, s, spec.palette.start)?;
    draw_marker(&mut img, spec, n, e, spec.palette.end)?;

    let m = spec.margin_px as i64;
    let cell_px = spec.cell_px as i64;
    let wall = spec.wall_px as i64;
    let half = wall / 2;
    let grid = n as i64 * cell_px;

    // Outer border.
    let color = spec.palette.wall;
    img.fill_rect(m - half, m - half, grid + wall, wall, color);
    img.fill_rect(m - half, m + grid - half, grid + wall, wall, color);
    img.fill_rect(m - half, m - half, wall, grid + wall, color);
    img.fill_rect(m + grid - half, m - half, wall, grid + wall, color);

    // Interior walls: check each east and south neighbor pair once.
    for row in 1..=n {
        for col in 1..=n {
            let here = Cell::new(row, col);
            if col < n {
                let east = Cell::new(row, col + 1);
                if maze.wall_between(here, east).expect("in grid") {
                    let x = m + col as i64 * cell_px;
                    let y = m + (row as i64 - 1) * cell_px;
                    img.fill_rect(x - half, y - half, wall, cell_px + wall, color);
                }
            }
            if row < n {
                let south = Cell::new(row + 1, col);
                if maze.wall_between(here, south).expect("in grid") {
                    let x = m + (col as i64 - 1) * cell_px;
                    let y = m + row as i64 * cell_px;
                    img.fill_rect(x - half, y - half, cell_px + wall, wall, color);
                }
            }
        }
    }
    Ok(img)
}

/// Filled square marker inset in a cell.
fn draw_marker(
    img: &mut Image,
    spec: &RenderSpec,
    n: u32,
    cell: Cell,
    color: Color,
) -> Result<(), RenderError> {
    let center = cell_center(spec, n, cell)?;
    let half = (spec.cell_px / 4) as i64;
    img.fill_rect(
        center.x as i64 - half,
        center.y as i64 - half,
        2 * half,
        2 * half,
        color,
    );
    Ok(())
}

/// Draw a path prefix over `base`: a square mark at every visited cell
/// center plus an axis-aligned stroke between consecutive centers. The base
/// image is not modified; an empty prefix returns it unchanged.
pub fn draw_path_overlay(
    base: &Image,
    spec: &RenderSpec,
    n: u32,
    prefix: &[Cell],
) -> Result<Image, RenderError> {
    let mut img = base.clone();
    if prefix.is_empty() {
        return Ok(img);
    }
    for window in prefix.windows(2) {
        if !window[0].is_adjacent(window[1]) {
            return Err(RenderError::InvalidPath(window[0], window[1]));
        }
    }
    let color = spec.palette.path;
    let t = spec.stroke_px() as i64;
    let half = t / 2;

    let mut centers = Vec::with_capacity(prefix.len());
    for &cell in prefix {
        centers.push(cell_center(spec, n, cell)?);
    }
    for pair in centers.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let x0 = a.x.min(b.x) as i64;
        let y0 = a.y.min(b.y) as i64;
        let x1 = a.x.max(b.x) as i64;
        let y1 = a.y.max(b.y) as i64;
        img.fill_rect(x0 - half, y0 - half, x1 - x0 + t, y1 - y0 + t, color);
    }
    // Vertex marks, slightly larger than the stroke so single-cell prefixes
    // are visible and joints look continuous.
    let mark = half + 2;
    for c in centers {
        img.fill_rect(
            c.x as i64 - mark,
            c.y as i64 - mark,
            2 * mark,
            2 * mark,
            color,
        );
    }
    Ok(img)
}

/// One frame per step t = 1..=len(path); frame t overlays the prefix of
/// length t on the base render. The final frame shows the whole path.
pub fn render_trajectory_frames(
    maze: &Maze,
    s: Cell,
    e: Cell,
    spec: &RenderSpec,
    path: &Path,
) -> Result<Vec<Image>, RenderError> {
    let base = render_maze(maze, s, e, spec)?;
    let mut frames = Vec::with_capacity(path.len());
    for t in 1..=path.len() {
        frames.push(draw_path_overlay(&base, spec, maze.n(), &path.cells()[..t])?);
    }
    Ok(frames)
}
