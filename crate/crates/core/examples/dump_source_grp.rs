//! Prints the flagship source group in `.grp` form.

fn main() {
    let (k, _) = lsg_core::presentation::k_group();
    print!("{}", k.presentation().unwrap().to_grp());
}
