use cstrigger::{fisher_exact_two_sided, relative_switching_propensity, ContingencyTable};

fn main() {
    let t = ContingencyTable::new(216, 17515, 659, 143299);
    let p = fisher_exact_two_sided(&t);
    println!("rsp = {:.4}", relative_switching_propensity(&t).unwrap());
    println!("p = {p:e} (log10 {:.4})", p.log10());
}
