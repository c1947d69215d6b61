//! Minimal polygon-format point-cloud reader/writer.
//!
//! Supports ASCII and binary little-endian variants, float32 x/y/z vertex
//! properties, optional uint8 red/green/blue, and skips everything else.
//! Big-endian files are rejected.

use super::{GeometryError, Point3, PointCloud};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// On-disk encodings we emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScalarType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl ScalarType {
    fn parse(token: &str) -> Option<ScalarType> {
        Some(match token {
            "char" | "int8" => ScalarType::I8,
            "uchar" | "uint8" => ScalarType::U8,
            "short" | "int16" => ScalarType::I16,
            "ushort" | "uint16" => ScalarType::U16,
            "int" | "int32" => ScalarType::I32,
            "uint" | "uint32" => ScalarType::U32,
            "float" | "float32" => ScalarType::F32,
            "double" | "float64" => ScalarType::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            ScalarType::I8 | ScalarType::U8 => 1,
            ScalarType::I16 | ScalarType::U16 => 2,
            ScalarType::I32 | ScalarType::U32 | ScalarType::F32 => 4,
            ScalarType::F64 => 8,
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: ScalarType },
    List,
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

struct Header {
    format: PlyFormat,
    elements: Vec<Element>,
    body_offset: usize,
}

fn err(msg: impl Into<String>) -> GeometryError {
    GeometryError::Format(msg.into())
}

fn parse_header(bytes: &[u8]) -> Result<Header, GeometryError> {
    let mut pos = 0usize;
    let mut next_line = || -> Result<String, GeometryError> {
        if pos >= bytes.len() {
            return Err(err("header ends before end_header"));
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos] != b'\n' {
            pos += 1;
        }
        let mut end = pos;
        if end > start && bytes[end - 1] == b'\r' {
            end -= 1;
        }
        pos += 1; // past the newline
        String::from_utf8(bytes[start..end].to_vec()).map_err(|_| err("header is not UTF-8"))
    };

    if next_line()?.trim() != "ply" {
        return Err(err("missing 'ply' magic line"));
    }
    let format_line = next_line()?;
    let format = match format_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["format", "ascii", "1.0"] => PlyFormat::Ascii,
        ["format", "binary_little_endian", "1.0"] => PlyFormat::BinaryLittleEndian,
        ["format", "binary_big_endian", ..] => {
            return Err(err("big-endian files are not supported"))
        }
        _ => return Err(err(format!("unrecognized format line '{format_line}'"))),
    };

    let mut elements: Vec<Element> = Vec::new();
    loop {
        let line = next_line()?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [] | ["comment", ..] | ["obj_info", ..] => continue,
            ["end_header"] => break,
            ["element", name, count] => {
                let count: usize = count
                    .parse()
                    .map_err(|_| err(format!("bad element count '{count}'")))?;
                elements.push(Element {
                    name: (*name).to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", _count_ty, _item_ty, _name] => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| err("property before any element"))?;
                element.properties.push(Property::List);
            }
            ["property", ty, name] => {
                let ty = ScalarType::parse(ty)
                    .ok_or_else(|| err(format!("unknown property type '{ty}'")))?;
                let element = elements
                    .last_mut()
                    .ok_or_else(|| err("property before any element"))?;
                element.properties.push(Property::Scalar {
                    name: (*name).to_string(),
                    ty,
                });
            }
            _ => return Err(err(format!("unrecognized header line '{line}'"))),
        }
    }

    Ok(Header {
        format,
        elements,
        body_offset: pos,
    })
}

struct VertexLayout {
    x: usize,
    y: usize,
    z: usize,
    rgb: Option<[usize; 3]>,
}

fn vertex_layout(element: &Element) -> Result<VertexLayout, GeometryError> {
    let find = |wanted: &str, require_f32: bool| -> Result<Option<usize>, GeometryError> {
        for (i, p) in element.properties.iter().enumerate() {
            if let Property::Scalar { name, ty } = p {
                if name == wanted {
                    if require_f32 && *ty != ScalarType::F32 {
                        return Err(err(format!("vertex property '{wanted}' must be float32")));
                    }
                    if !require_f32 && *ty != ScalarType::U8 {
                        return Err(err(format!("vertex property '{wanted}' must be uint8")));
                    }
                    return Ok(Some(i));
                }
            }
        }
        Ok(None)
    };
    let x = find("x", true)?.ok_or_else(|| err("vertex element lacks float x"))?;
    let y = find("y", true)?.ok_or_else(|| err("vertex element lacks float y"))?;
    let z = find("z", true)?.ok_or_else(|| err("vertex element lacks float z"))?;
    let r = find("red", false)?;
    let g = find("green", false)?;
    let b = find("blue", false)?;
    let rgb = match (r, g, b) {
        (Some(r), Some(g), Some(b)) => Some([r, g, b]),
        _ => None,
    };
    Ok(VertexLayout { x, y, z, rgb })
}

/// Load a point cloud. Vertex positions must be float32 x/y/z; uint8
/// red/green/blue is attached when all three are present.
pub fn load_point_cloud(path: impl AsRef<Path>) -> Result<PointCloud, GeometryError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let header = parse_header(&bytes)?;
    let body = &bytes[header.body_offset..];

    let vertex_idx = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| err("no vertex element declared"))?;
    let layout = vertex_layout(&header.elements[vertex_idx])?;

    let (points, colors) = match header.format {
        PlyFormat::Ascii => read_ascii(body, &header.elements, vertex_idx, &layout)?,
        PlyFormat::BinaryLittleEndian => read_binary(body, &header.elements, vertex_idx, &layout)?,
    };
    if points.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    PointCloud::new(points, colors)
}

type Vertices = (Vec<Point3>, Option<Vec<[u8; 3]>>);

fn read_ascii(
    body: &[u8],
    elements: &[Element],
    vertex_idx: usize,
    layout: &VertexLayout,
) -> Result<Vertices, GeometryError> {
    let text = std::str::from_utf8(body).map_err(|_| err("ASCII body is not UTF-8"))?;
    let mut tokens = text.split_whitespace();
    let mut take = |what: &str| -> Result<&str, GeometryError> {
        tokens
            .next()
            .ok_or_else(|| err(format!("body truncated while reading {what}")))
    };

    let mut points = Vec::new();
    let mut colors = Vec::new();
    for (ei, element) in elements.iter().enumerate() {
        if ei > vertex_idx {
            break; // trailing elements are not needed
        }
        for _row in 0..element.count {
            if ei != vertex_idx {
                for p in &element.properties {
                    match p {
                        Property::Scalar { .. } => {
                            take("skipped element")?;
                        }
                        Property::List => {
                            let n: usize = take("list count")?
                                .parse()
                                .map_err(|_| err("bad list count"))?;
                            for _ in 0..n {
                                take("list item")?;
                            }
                        }
                    }
                }
                continue;
            }
            let mut coords = [0f32; 3];
            let mut rgb = [0u8; 3];
            for (pi, p) in element.properties.iter().enumerate() {
                let token = take("vertex property")?;
                let _ = p; // scalar vs list: vertex lists are rejected below
                if matches!(p, Property::List) {
                    return Err(err("list properties on vertices are not supported"));
                }
                if pi == layout.x || pi == layout.y || pi == layout.z {
                    let v: f32 = token
                        .parse()
                        .map_err(|_| err(format!("bad float '{token}'")))?;
                    if pi == layout.x {
                        coords[0] = v;
                    } else if pi == layout.y {
                        coords[1] = v;
                    } else {
                        coords[2] = v;
                    }
                } else if let Some(idx) = layout.rgb {
                    if let Some(ch) = idx.iter().position(|&i| i == pi) {
                        rgb[ch] = token
                            .parse()
                            .map_err(|_| err(format!("bad color byte '{token}'")))?;
                    }
                }
            }
            points.push(Point3::new(
                coords[0] as f64,
                coords[1] as f64,
                coords[2] as f64,
            ));
            if layout.rgb.is_some() {
                colors.push(rgb);
            }
        }
    }
    Ok((points, layout.rgb.map(|_| colors)))
}

fn read_binary(
    body: &[u8],
    elements: &[Element],
    vertex_idx: usize,
    layout: &VertexLayout,
) -> Result<Vertices, GeometryError> {
    let mut offset = 0usize;
    let mut points = Vec::new();
    let mut colors = Vec::new();
    for (ei, element) in elements.iter().enumerate() {
        if ei > vertex_idx {
            break;
        }
        if ei != vertex_idx {
            // Skippable only when the row size is fixed.
            let mut row = 0usize;
            for p in &element.properties {
                match p {
                    Property::Scalar { ty, .. } => row += ty.size(),
                    Property::List => {
                        return Err(err(format!(
                            "cannot skip list property in binary element '{}'",
                            element.name
                        )))
                    }
                }
            }
            offset = offset
                .checked_add(row * element.count)
                .filter(|&end| end <= body.len())
                .ok_or_else(|| err("body truncated while skipping element"))?;
            continue;
        }

        // Precompute per-property offsets within a vertex row.
        let mut prop_offsets = Vec::with_capacity(element.properties.len());
        let mut row_size = 0usize;
        for p in &element.properties {
            prop_offsets.push(row_size);
            match p {
                Property::Scalar { ty, .. } => row_size += ty.size(),
                Property::List => return Err(err("list properties on vertices are not supported")),
            }
        }
        let need = row_size
            .checked_mul(element.count)
            .ok_or_else(|| err("vertex element too large"))?;
        if offset + need > body.len() {
            return Err(err(format!(
                "body truncated: header declares {} vertices but data holds {}",
                element.count,
                (body.len() - offset) / row_size.max(1)
            )));
        }
        for row in 0..element.count {
            let base = offset + row * row_size;
            let f32_at = |pi: usize| -> f32 {
                let o = base + prop_offsets[pi];
                f32::from_le_bytes([body[o], body[o + 1], body[o + 2], body[o + 3]])
            };
            points.push(Point3::new(
                f32_at(layout.x) as f64,
                f32_at(layout.y) as f64,
                f32_at(layout.z) as f64,
            ));
            if let Some(idx) = layout.rgb {
                colors.push([
                    body[base + prop_offsets[idx[0]]],
                    body[base + prop_offsets[idx[1]]],
                    body[base + prop_offsets[idx[2]]],
                ]);
            }
        }
        offset += need;
    }
    Ok((points, layout.rgb.map(|_| colors)))
}

/// Write a cloud in the requested encoding. Positions narrow to float32.
pub fn save_point_cloud(
    cloud: &PointCloud,
    path: impl AsRef<Path>,
    format: PlyFormat,
) -> Result<(), GeometryError> {
    let mut w = BufWriter::new(File::create(path)?);
    let format_name = match format {
        PlyFormat::Ascii => "ascii",
        PlyFormat::BinaryLittleEndian => "binary_little_endian",
    };
    write!(w, "ply\nformat {format_name} 1.0\n")?;
    write!(w, "element vertex {}\n", cloud.len())?;
    write!(w, "property float x\nproperty float y\nproperty float z\n")?;
    if cloud.colors().is_some() {
        write!(
            w,
            "property uchar red\nproperty uchar green\nproperty uchar blue\n"
        )?;
    }
    write!(w, "end_header\n")?;

    for (i, p) in cloud.points().iter().enumerate() {
        let (x, y, z) = (p.x as f32, p.y as f32, p.z as f32);
        match format {
            PlyFormat::Ascii => {
                write!(w, "{x} {y} {z}")?;
                if let Some(colors) = cloud.colors() {
                    let [r, g, b] = colors[i];
                    write!(w, " {r} {g} {b}")?;
                }
                writeln!(w)?;
            }
            PlyFormat::BinaryLittleEndian => {
                w.write_all(&x.to_le_bytes())?;
                w.write_all(&y.to_le_bytes())?;
                w.write_all(&z.to_le_bytes())?;
                if let Some(colors) = cloud.colors() {
                    w.write_all(&colors[i])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}
