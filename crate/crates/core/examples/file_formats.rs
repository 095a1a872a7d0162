//! Kernel JSON, grid-function CSV with its layout sidecar, and the kernel table.

use dyadic::haar::{GridFunction, GridLayout, HaarIndex};
use dyadic::io::{read_grid_function, read_kernel, write_grid_function, write_kernel, write_kernel_table, KernelColumn};
use dyadic::kernel::{gaussian, Window};

fn main() -> dyadic::error::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");
    let kernel_path = dir.path().join("k.json");
    let k = gaussian(1.0, Window::new(-6, 6)?)?;
    write_kernel(&kernel_path, &k)?;
    println!("kernel reloads exactly: {}", read_kernel(&kernel_path)? == k);

    let grid_path = dir.path().join("u0.csv");
    let u0 = GridFunction::haar(GridLayout::new(1, 2)?, HaarIndex::new(0, 1))?;
    write_grid_function(&grid_path, &u0)?;
    print!("{}", std::fs::read_to_string(&grid_path).expect("csv"));
    print!("{}", std::fs::read_to_string(grid_path.with_extension("json")).expect("sidecar"));
    println!("grid function reloads exactly: {}", read_grid_function(&grid_path)? == u0);

    write_kernel_table(std::io::stdout().lock(), &k, &[KernelColumn::Lambda, KernelColumn::K, KernelColumn::Stab])
}
