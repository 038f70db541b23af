//! Shifted and unshifted corrected models differ by a constant, so the
//! trust-region iterates coincide.
//!
//! ```bash
//! cargo run --release --example shift_equivalence
//! ```

use modadapt::drivers::{run_ma_tr, MaTrSettings, StoppingCriteria};
use modadapt::problem::catalog;
use modadapt::ModelForm;

fn main() -> modadapt::Result<()> {
    let stop = StoppingCriteria::default();
    for e in catalog() {
        let runs = [ModelForm::Unshifted, ModelForm::Shifted].map(|form| {
            let settings = MaTrSettings {
                model_form: form,
                ..Default::default()
            };
            run_ma_tr(&e.build(), e.start, &settings, &stop)
        });
        let [a, b] = runs;
        let (a, b) = (a?, b?);
        let worst = a
            .references()
            .zip(b.references())
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max);
        println!(
            "{}: {} vs {} records, largest iterate difference {worst:e}",
            e.id,
            a.records.len(),
            b.records.len()
        );
    }
    Ok(())
}
