fn main() {
    let maze = cotforge_core::maze::Maze::generate(6, 42).unwrap();
    let spec = cotforge_core::render::RenderSpec::default();
    let s = cotforge_core::maze::Cell::new(1, 1);
    let e = cotforge_core::maze::Cell::new(6, 6);
    let img = cotforge_core::render::render_maze(&maze, s, e, &spec).unwrap();
    println!("hash: {}", img.content_hash());
    println!("dims: {}x{}", img.width(), img.height());
    cotforge::png::write_png(&img, std::path::Path::new("/tmp/golden.png")).unwrap();
    // Overlay variant for auditing the path drawing too.
    let path = maze.solve(s, e).unwrap();
    let overlay = cotforge_core::render::draw_path_overlay(&img, &spec, 6, path.cells()).unwrap();
    println!("overlay_hash: {}", overlay.content_hash());
    cotforge::png::write_png(&overlay, std::path::Path::new("/tmp/golden_overlay.png")).unwrap();
}
