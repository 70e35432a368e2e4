//! Writes a diagram as Graphviz DOT and as canonical JSON, then reads the
//! JSON back. Render the DOT with `dot -Tsvg diagram.dot -o diagram.svg`.

use mvdd_risk::model::Document;
use mvdd_risk::mvdd::{canonicalize, demo_diagram, export_dot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = demo_diagram();
    let dir = std::env::temp_dir().join("mvdd-export-example");
    std::fs::create_dir_all(&dir)?;

    let dot = export_dot(&model);
    std::fs::write(dir.join("diagram.dot"), &dot)?;
    println!("{dot}");

    let path = dir.join("diagram.json");
    Document::Mvdd(canonicalize(&model)).save(&path)?;
    let Document::Mvdd(back) = Document::load(&path)? else {
        return Err("expected a diagram".into());
    };
    println!("wrote {} and diagram.dot", path.display());
    println!("reloaded {} nodes, same diagram: {}", back.nodes.len(), back == canonicalize(&model));
    Ok(())
}
