//! Debug rendering of a cut configuration.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::mesh::BackgroundMesh;
use crate::scalar::Real;

use super::cut::Classification;
use super::cut_mesh::CutMesh;

const CANVAS: f64 = 800.0;

/// Renders element outlines, shaded inside polygons and boundary segments
/// with their normals.
pub fn render_svg<T: Real>(mesh: &BackgroundMesh<T>, cut: &CutMesh<T>) -> String {
    let b = mesh.bbox;
    let (x0, y0) = (b.min[0].to_f64_lossy(), b.min[1].to_f64_lossy());
    let (w, h) = (b.width().to_f64_lossy(), b.height().to_f64_lossy());
    let scale = CANVAS / w.max(h);
    let px = |p: [T; 2]| {
        let x = (p[0].to_f64_lossy() - x0) * scale;
        let y = (h - (p[1].to_f64_lossy() - y0)) * scale;
        (x, y)
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        w * scale,
        h * scale,
        w * scale,
        h * scale
    );
    for e in 0..mesh.num_elements() {
        let fill = match cut.classes[e] {
            Classification::Inside => "#dde8f5",
            Classification::Cut => "#f5e6c8",
            Classification::Outside => "none",
        };
        let pts: Vec<String> = mesh
            .element_points(e)
            .iter()
            .map(|&p| {
                let (x, y) = px(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="{fill}" stroke="#888" stroke-width="0.5"/>"##,
            pts.join(" ")
        );
    }
    for d in &cut.decomps {
        if d.classification != Classification::Cut {
            continue;
        }
        for t in &d.inside_subtriangles {
            let pts: Vec<String> = t
                .iter()
                .map(|&p| {
                    let (x, y) = px(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(
                out,
                r##"<polygon points="{}" fill="#6a9fd4" fill-opacity="0.6"/>"##,
                pts.join(" ")
            );
        }
    }
    let arrow = 0.25 * mesh.h_global.to_f64_lossy() * scale;
    for d in &cut.decomps {
        for s in &d.boundary_segments {
            let (ax, ay) = px(s.a);
            let (bx, by) = px(s.b);
            let _ = writeln!(
                out,
                r##"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}" stroke="#c0392b" stroke-width="1.5"/>"##
            );
            let (mx, my) = px(s.midpoint());
            let (nx, ny) = (s.normal[0].to_f64_lossy(), s.normal[1].to_f64_lossy());
            let _ = writeln!(
                out,
                r##"<line x1="{mx:.3}" y1="{my:.3}" x2="{:.3}" y2="{:.3}" stroke="#27ae60" stroke-width="1"/>"##,
                mx + arrow * nx,
                my - arrow * ny
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg<T: Real>(path: &Path, mesh: &BackgroundMesh<T>, cut: &CutMesh<T>) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_svg(mesh, cut).as_bytes())?;
    Ok(())
}
