//! COLLADA 1.4.1 writer.
//!
//! Output depends only on the input meshes and camera: element order is
//! fixed and every number is printed with six decimals.

use std::io::{self, Write};

use super::{cross, normalize, sub, Camera, Mesh, Point3};

/// Decimal digits of `v`, written from the end of `buf`; returns the start.
fn digits(mut v: u64, buf: &mut [u8], mut end: usize, min_len: usize) -> usize {
    let stop = end - min_len;
    while v > 0 || end > stop {
        end -= 1;
        buf[end] = b'0' + (v % 10) as u8;
        v /= 10;
    }
    end
}

fn int(out: &mut impl Write, v: u64) -> io::Result<()> {
    let mut buf = [0u8; 20];
    let start = digits(v, &mut buf, 20, 1);
    out.write_all(&buf[start..])
}

/// Fixed six-decimal formatting via integer millionths, much faster than
/// float formatting; values that round to zero print unsigned.
fn num(out: &mut impl Write, x: f64) -> io::Result<()> {
    let m = (x * 1e6).round();
    if !(m.abs() < 9e15) {
        return write!(out, "{:.6}", x + 0.0);
    }
    let a = m.abs() as u64;
    let mut buf = [0u8; 24];
    let frac = digits(a % 1_000_000, &mut buf, 24, 6);
    buf[frac - 1] = b'.';
    let mut start = digits(a / 1_000_000, &mut buf, frac - 1, 1);
    if m < 0.0 {
        start -= 1;
        buf[start] = b'-';
    }
    out.write_all(&buf[start..])
}

fn float_list(out: &mut impl Write, values: impl IntoIterator<Item = f64>) -> io::Result<()> {
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            out.write_all(b" ")?;
        }
        num(out, v)?;
    }
    Ok(())
}

fn source<I>(out: &mut impl Write, id: &str, params: &[&str], count: usize, data: I) -> io::Result<()>
where
    I: IntoIterator<Item = f64>,
{
    let stride = params.len();
    writeln!(out, "      <source id=\"{id}\">")?;
    write!(
        out,
        "        <float_array id=\"{id}-array\" count=\"{}\">",
        count * stride
    )?;
    float_list(out, data)?;
    out.write_all(b"</float_array>\n        <technique_common>\n")?;
    writeln!(
        out,
        "          <accessor source=\"#{id}-array\" count=\"{count}\" stride=\"{stride}\">"
    )?;
    for p in params {
        writeln!(out, "            <param name=\"{p}\" type=\"float\"/>")?;
    }
    out.write_all(b"          </accessor>\n        </technique_common>\n      </source>\n")
}

fn geometry(out: &mut impl Write, index: usize, mesh: &Mesh) -> io::Result<()> {
    let id = format!("mesh{index}");
    let xyz = ["X", "Y", "Z"];
    writeln!(out, "    <geometry id=\"{id}\" name=\"{id}\">")?;
    out.write_all(b"      <mesh>\n")?;
    let n = mesh.vertices.len();
    let positions = mesh.vertices.iter().flatten().copied();
    source(out, &format!("{id}-positions"), &xyz, n, positions)?;
    let normals = (0..mesh.triangles.len()).flat_map(|i| mesh.face_normal(i));
    source(out, &format!("{id}-normals"), &xyz, mesh.triangles.len(), normals)?;
    let colours = mesh.colours.iter().flatten().copied();
    source(out, &format!("{id}-colours"), &["R", "G", "B"], n, colours)?;
    writeln!(out, "        <vertices id=\"{id}-vertices\">")?;
    writeln!(
        out,
        "          <input semantic=\"POSITION\" source=\"#{id}-positions\"/>"
    )?;
    out.write_all(b"        </vertices>\n")?;
    writeln!(out, "        <triangles count=\"{}\">", mesh.triangles.len())?;
    writeln!(
        out,
        "          <input semantic=\"VERTEX\" source=\"#{id}-vertices\" offset=\"0\"/>"
    )?;
    writeln!(
        out,
        "          <input semantic=\"NORMAL\" source=\"#{id}-normals\" offset=\"1\"/>"
    )?;
    writeln!(
        out,
        "          <input semantic=\"COLOR\" source=\"#{id}-colours\" offset=\"0\" set=\"0\"/>"
    )?;
    out.write_all(b"          <p>")?;
    for (i, t) in mesh.triangles.iter().enumerate() {
        for (k, v) in t.iter().enumerate() {
            if i > 0 || k > 0 {
                out.write_all(b" ")?;
            }
            int(out, *v as u64)?;
            out.write_all(b" ")?;
            int(out, i as u64)?;
        }
    }
    out.write_all(b"</p>\n        </triangles>\n      </mesh>\n    </geometry>\n")
}

/// Row-major camera-to-world matrix looking from `eye` at `target` with +z
/// up; the camera looks down its local −z axis.
fn look_at(eye: Point3, target: Point3) -> [[f64; 4]; 4] {
    let back = normalize(sub(eye, target));
    let mut right = cross([0.0, 0.0, 1.0], back);
    if right.iter().all(|c| c.abs() < 1e-12) {
        right = [1.0, 0.0, 0.0];
    }
    let right = normalize(right);
    let up = cross(back, right);
    [
        [right[0], up[0], back[0], eye[0]],
        [right[1], up[1], back[1], eye[1]],
        [right[2], up[2], back[2], eye[2]],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

/// Serialize `meshes` and a perspective camera; empty meshes are skipped.
pub fn write_collada(meshes: &[&Mesh], camera: &Camera, out: impl Write) -> io::Result<()> {
    let mut w = io::BufWriter::new(out);
    let w = &mut w;
    w.write_all(b"<?xml version=\"1.0\" encoding=\"utf-8\"?>\n")?;
    w.write_all(
        b"<COLLADA xmlns=\"http://www.collada.org/2005/11/COLLADASchema\" version=\"1.4.1\">\n",
    )?;
    w.write_all(b"  <asset>\n")?;
    w.write_all(b"    <contributor>\n      <authoring_tool>pftrail</authoring_tool>\n    </contributor>\n")?;
    // Fixed timestamps keep the output reproducible.
    w.write_all(b"    <created>2000-01-01T00:00:00Z</created>\n")?;
    w.write_all(b"    <modified>2000-01-01T00:00:00Z</modified>\n")?;
    w.write_all(b"    <unit name=\"meter\" meter=\"1\"/>\n")?;
    w.write_all(b"    <up_axis>Z_UP</up_axis>\n")?;
    w.write_all(b"  </asset>\n")?;

    let distance = sub(camera.position, camera.look_at)
        .iter()
        .map(|c| c * c)
        .sum::<f64>()
        .sqrt()
        .max(1e-9);
    w.write_all(b"  <library_cameras>\n")?;
    w.write_all(b"    <camera id=\"camera\" name=\"camera\">\n")?;
    w.write_all(b"      <optics>\n        <technique_common>\n          <perspective>\n")?;
    w.write_all(b"            <yfov>")?;
    num(w, camera.fov)?;
    w.write_all(b"</yfov>\n            <aspect_ratio>")?;
    num(w, 4.0 / 3.0)?;
    w.write_all(b"</aspect_ratio>\n            <znear>")?;
    num(w, distance * 1e-3)?;
    w.write_all(b"</znear>\n            <zfar>")?;
    num(w, distance * 100.0)?;
    w.write_all(b"</zfar>\n")?;
    w.write_all(b"          </perspective>\n        </technique_common>\n      </optics>\n")?;
    w.write_all(b"    </camera>\n")?;
    w.write_all(b"  </library_cameras>\n")?;

    let present: Vec<(usize, &Mesh)> = meshes
        .iter()
        .copied()
        .filter(|m| !m.is_empty())
        .enumerate()
        .collect();
    if !present.is_empty() {
        w.write_all(b"  <library_geometries>\n")?;
        for &(i, m) in &present {
            geometry(w, i, m)?;
        }
        w.write_all(b"  </library_geometries>\n")?;
    }

    w.write_all(b"  <library_visual_scenes>\n")?;
    w.write_all(b"    <visual_scene id=\"scene\" name=\"scene\">\n")?;
    w.write_all(b"      <node id=\"camera-node\" name=\"camera\">\n        <matrix>")?;
    float_list(w, look_at(camera.position, camera.look_at).iter().flatten().copied())?;
    w.write_all(b"</matrix>\n        <instance_camera url=\"#camera\"/>\n      </node>\n")?;
    for &(i, _) in &present {
        writeln!(w, "      <node id=\"node{i}\" name=\"mesh{i}\">")?;
        writeln!(w, "        <instance_geometry url=\"#mesh{i}\"/>")?;
        w.write_all(b"      </node>\n")?;
    }
    w.write_all(b"    </visual_scene>\n")?;
    w.write_all(b"  </library_visual_scenes>\n")?;
    w.write_all(b"  <scene>\n    <instance_visual_scene url=\"#scene\"/>\n  </scene>\n")?;
    w.write_all(b"</COLLADA>\n")?;
    w.flush()
}
