//! `asplund`: file-level frontend over the library. Every subcommand is a
//! thin shim around one library call chain, so outputs are byte-identical
//! to driving the library directly with the same parameters.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asplund_core::asplund::{
    distance_map_flat, distance_map_flat_tolerance, distance_map_general, distance_map_tolerance,
};
use asplund_core::io::detections::{detections_string, write_detections};
use asplund_core::io::pfm::{read_map, write_map};
use asplund_core::io::pgm::{read_pgm, write_pgm, PgmFormat};
use asplund_core::io::probe::{read_probe, write_probe, ProbeFile};
use asplund_core::lip::{invert_convention, scalar_mul};
use asplund_core::matcher::{detect, extract_probe};
use asplund_core::{
    Connectivity, DistanceMap, Error, FlatDomain, GreyScale, Image, PositivityPolicy, Result,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "asplund",
    version,
    about = "Distance maps and illumination-invariant pattern matching on grey-scale images"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Grey-scale bound for images read from or written to PGM files.
    #[arg(long = "M", global = true, default_value_t = 256.0)]
    m: f64,

    /// Map between the file convention (0 = black) and the working
    /// convention (0 = white) on every image read and write. Stencil masks
    /// and visualizations are never inverted.
    #[arg(long, global = true)]
    invert: bool,

    /// Lift grey tones below this floor before forming ratios (default 1).
    #[arg(long, global = true, conflicts_with = "strict_positivity")]
    clamp_floor: Option<f64>,

    /// Refuse windows touching non-positive grey tones instead of clamping.
    #[arg(long, global = true)]
    strict_positivity: bool,

    /// Worker threads for map evaluation; results are bit-identical for
    /// every thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Multiply an image by a real factor under the bounded grey-tone law.
    Lipmul {
        /// Input PGM (P2 or P5, maxval up to 255).
        #[arg(short, long)]
        input: PathBuf,
        /// Output PGM.
        #[arg(short, long)]
        output: PathBuf,
        /// Multiplication factor; 1 leaves grey tones unchanged.
        #[arg(long)]
        k: f64,
        /// Write ASCII (P2) instead of binary (P5).
        #[arg(long)]
        ascii: bool,
    },
    /// Cut a probe out of an image and save it as a text file.
    ProbeExtract {
        /// Input PGM.
        #[arg(short, long)]
        input: PathBuf,
        /// Output probe text file.
        #[arg(short, long)]
        output: PathBuf,
        /// Rectangular domain `x,y,w,h`; the anchor defaults to its
        /// top-left corner.
        #[arg(long, value_parser = parse_rect, required_unless_present = "mask", conflicts_with = "mask")]
        rect: Option<Rect>,
        /// Stencil PGM of the same size as the input: nonzero pixels form
        /// the domain; the anchor defaults to the first domain pixel in
        /// row-major order.
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Anchor pixel `x,y` overriding the default.
        #[arg(long, value_parser = parse_pair)]
        anchor: Option<(usize, usize)>,
    },
    /// Distance map between an image and a probe.
    Map {
        /// Input PGM.
        #[arg(short, long)]
        input: PathBuf,
        /// Probe file; its grey-scale bound must match the image's.
        #[arg(long)]
        probe: PathBuf,
        /// Replace the probe's values with this constant level, keeping its
        /// domain (runs the flat fast path; the level does not change the
        /// result).
        #[arg(long)]
        flat: Option<f64>,
        /// Fraction of window points to discard at each bound, in [0, 0.5[.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Output PFM; a `<path>.mask.pgm` validity sidecar is written next
        /// to it.
        #[arg(short, long)]
        output: PathBuf,
        /// Optional 8-bit visualization PGM, min-max normalized over valid
        /// pixels.
        #[arg(long)]
        viz: Option<PathBuf>,
    },
    /// Detections: one local minimum per connected below-threshold region.
    Detect {
        /// Input PFM written by `map` (the `.mask.pgm` sidecar is picked up
        /// automatically when present).
        #[arg(short, long)]
        input: PathBuf,
        /// Score threshold; only map values strictly below it detect.
        #[arg(long)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = Conn::Eight)]
        connectivity: Conn,
        /// Output text file of `x y score` lines; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Darken, map, and detect in one in-memory pass.
    Pipeline {
        /// Input scene PGM.
        #[arg(short, long)]
        input: PathBuf,
        /// Probe file.
        #[arg(long)]
        probe: PathBuf,
        /// Darkening factor applied to the scene before matching.
        #[arg(long, default_value_t = 0.3)]
        k: f64,
        /// Fraction of window points discarded at each bound.
        #[arg(long, default_value_t = 0.3)]
        tolerance: f64,
        /// Detection score threshold.
        #[arg(long, default_value_t = 0.7)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = Conn::Eight)]
        connectivity: Conn,
        /// Output text file of `x y score` lines; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also export the intermediate distance map as PFM.
        #[arg(long)]
        map_out: Option<PathBuf>,
        /// Visualization PGM of the intermediate map.
        #[arg(long)]
        viz: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    x: usize,
    y: usize,
    w: usize,
    h: usize,
}

fn parse_rect(s: &str) -> std::result::Result<Rect, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected x,y,w,h, got {s:?}"));
    }
    let mut nums = [0usize; 4];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| format!("bad component {part:?}: {e}"))?;
    }
    Ok(Rect {
        x: nums[0],
        y: nums[1],
        w: nums[2],
        h: nums[3],
    })
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected x,y, got {s:?}"));
    }
    let x = parts[0]
        .trim()
        .parse()
        .map_err(|e| format!("bad component {:?}: {e}", parts[0]))?;
    let y = parts[1]
        .trim()
        .parse()
        .map_err(|e| format!("bad component {:?}: {e}", parts[1]))?;
    Ok((x, y))
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Conn {
    Four,
    Eight,
}

impl From<Conn> for Connectivity {
    fn from(c: Conn) -> Connectivity {
        match c {
            Conn::Four => Connectivity::Four,
            Conn::Eight => Connectivity::Eight,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io(_) | Error::Parse { .. } => 2,
                _ => 1,
            })
        }
    }
}

fn policy(g: &Global) -> PositivityPolicy {
    if g.strict_positivity {
        PositivityPolicy::Strict
    } else {
        PositivityPolicy::Clamp {
            floor: g.clamp_floor.unwrap_or(1.0),
        }
    }
}

fn load_image(path: &Path, g: &Global) -> Result<Image> {
    let f = read_pgm(path, GreyScale::new(g.m)?)?;
    if g.invert {
        invert_convention(&f)
    } else {
        Ok(f)
    }
}

fn store_image(f: &Image, path: &Path, g: &Global, format: PgmFormat) -> Result<()> {
    if g.invert {
        write_pgm(&invert_convention(f)?, path, format)
    } else {
        write_pgm(f, path, format)
    }
}

fn emit_detections(
    map: &DistanceMap,
    threshold: f64,
    connectivity: Conn,
    output: Option<&Path>,
) -> Result<()> {
    let found = detect(map, threshold, connectivity.into())?;
    match output {
        Some(path) => write_detections(&found, path),
        None => {
            print!("{}", detections_string(&found));
            Ok(())
        }
    }
}

fn export_map(map: &DistanceMap, path: &Path, viz: Option<&Path>) -> Result<()> {
    write_map(map, path, viz)?;
    if viz.is_some() && map.field().valid_count() == 0 {
        eprintln!("warning: map has no valid pixels; visualization is all zero");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Lipmul {
            input,
            output,
            k,
            ascii,
        } => {
            let f = load_image(&input, g)?;
            let format = if ascii {
                PgmFormat::Ascii
            } else {
                PgmFormat::Binary
            };
            store_image(&scalar_mul(k, &f)?, &output, g, format)
        }
        Command::ProbeExtract {
            input,
            output,
            rect,
            mask,
            anchor,
        } => {
            let f = load_image(&input, g)?;
            let (anchor, domain) = match (rect, mask) {
                (Some(r), None) => {
                    let anchor = anchor.unwrap_or((r.x, r.y));
                    let offsets = rect_offsets(r, anchor);
                    (anchor, FlatDomain::new(offsets)?)
                }
                (None, Some(path)) => {
                    let stencil = read_pgm(&path, f.scale())?;
                    mask_domain(&f, &stencil, anchor)?
                }
                _ => unreachable!("clap enforces exactly one of --rect/--mask"),
            };
            let probe = extract_probe(&f, anchor, &domain, policy(g))?;
            write_probe(
                &ProbeFile {
                    anchor: (anchor.0 as i64, anchor.1 as i64),
                    probe,
                },
                &output,
            )
        }
        Command::Map {
            input,
            probe,
            flat,
            tolerance,
            output,
            viz,
        } => {
            let f = load_image(&input, g)?;
            let pf = read_probe(&probe)?;
            let pol = policy(g);
            let map = match (flat, tolerance) {
                (Some(b0), None) => distance_map_flat(&f, b0, &pf.probe.domain(), pol)?,
                (Some(b0), Some(p)) => {
                    distance_map_flat_tolerance(&f, b0, &pf.probe.domain(), p, pol)?
                }
                (None, None) => distance_map_general(&f, &pf.probe, pol)?,
                (None, Some(p)) => distance_map_tolerance(&f, &pf.probe, p, pol)?,
            };
            export_map(&map, &output, viz.as_deref())
        }
        Command::Detect {
            input,
            threshold,
            connectivity,
            output,
        } => {
            let map = read_map(&input)?;
            emit_detections(&map, threshold, connectivity, output.as_deref())
        }
        Command::Pipeline {
            input,
            probe,
            k,
            tolerance,
            threshold,
            connectivity,
            output,
            map_out,
            viz,
        } => {
            let scene = load_image(&input, g)?;
            let pf = read_probe(&probe)?;
            let darkened = scalar_mul(k, &scene)?;
            let map = distance_map_tolerance(&darkened, &pf.probe, tolerance, policy(g))?;
            if let Some(path) = &map_out {
                export_map(&map, path, viz.as_deref())?;
            }
            emit_detections(&map, threshold, connectivity, output.as_deref())
        }
    }
}

fn rect_offsets(r: Rect, anchor: (usize, usize)) -> Vec<(i64, i64)> {
    let mut offsets = Vec::with_capacity(r.w * r.h);
    for y in r.y..r.y + r.h {
        for x in r.x..r.x + r.w {
            offsets.push((x as i64 - anchor.0 as i64, y as i64 - anchor.1 as i64));
        }
    }
    offsets
}

/// Domain of all nonzero stencil pixels, anchored at `anchor` or at the
/// first domain pixel in row-major order.
fn mask_domain(
    f: &Image,
    stencil: &Image,
    anchor: Option<(usize, usize)>,
) -> Result<((usize, usize), FlatDomain)> {
    if stencil.width() != f.width() || stencil.height() != f.height() {
        return Err(Error::Parameter(format!(
            "stencil is {}x{} but the image is {}x{}",
            stencil.width(),
            stencil.height(),
            f.width(),
            f.height()
        )));
    }
    let members: Vec<(usize, usize)> = (0..f.height())
        .flat_map(|y| (0..f.width()).map(move |x| (x, y)))
        .filter(|&(x, y)| stencil.get(x, y) > 0.0)
        .collect();
    let Some(&first) = members.first() else {
        return Err(Error::Parameter("stencil selects no pixels".to_string()));
    };
    let anchor = anchor.unwrap_or(first);
    let offsets = members
        .iter()
        .map(|&(x, y)| (x as i64 - anchor.0 as i64, y as i64 - anchor.1 as i64))
        .collect();
    Ok((anchor, FlatDomain::new(offsets)?))
}
