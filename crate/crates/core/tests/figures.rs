use jahn_teller::sweep::{self, Table, ENTSOSC_DELTAS};

/// Midpoint alpha and value of the steepest forward difference of entropy(alpha) per delta.
fn steepest(table: &Table) -> Vec<(f64, f64, f64)> {
    let (deltas, alphas, entropy) = (table.numbers("delta"), table.numbers("alpha"), table.numbers("entropy"));
    ENTSOSC_DELTAS
        .iter()
        .map(|&d| {
            let idx: Vec<usize> = (0..deltas.len()).filter(|&i| deltas[i] == d).collect();
            let (alpha, slope) = idx
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0], w[1]);
                    (0.5 * (alphas[a] + alphas[b]), (entropy[b] - entropy[a]) / (alphas[b] - alphas[a]))
                })
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            (d, alpha, slope)
        })
        .collect()
}

#[test]
fn entsosc_transition_sharpens_toward_alpha_one() {
    let table = sweep::figure("entsosc", None).unwrap();
    assert_eq!(table.flagged(), 0);
    let peaks = steepest(&table);
    let (_, a4, s4) = peaks[3];
    let (_, a8, s8) = peaks[4];
    // Above the classical threshold the transition point approaches alpha = 1 and steepens.
    assert!((a8 - 1.0).abs() < (a4 - 1.0).abs(), "{peaks:?}");
    assert!(s8 > s4, "{peaks:?}");
    assert!(peaks.iter().all(|&(_, _, s)| s <= s8 + 1e-12), "{peaks:?}");
}
