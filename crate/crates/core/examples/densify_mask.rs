//! Morphological closing of a sparse visibility mask.
use viewsynth::{densify_mask, Mask};

fn show(m: &Mask) {
    for y in 0..m.height() {
        let row: String = (0..m.width()).map(|x| if m.get(x, y) > 0.0 { '#' } else { '.' }).collect();
        println!("  {row}");
    }
}

fn main() -> viewsynth::Result<()> {
    let (w, h) = (16, 8);
    let bits: Vec<bool> = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            (2..14).contains(&x) && (1..7).contains(&y) && (x + 3 * y) % 5 != 0
        })
        .collect();
    let sparse = Mask::from_bools(w, h, &bits)?;
    println!("sparse ({} set)", sparse.count_set());
    show(&sparse);
    for r in [1, 2] {
        let dense = densify_mask(&sparse, r);
        println!("radius {r} ({} set)", dense.count_set());
        show(&dense);
    }
    Ok(())
}
