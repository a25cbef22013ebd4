use super::formula::Formula;
use super::signature::Signature;
use crate::error::{Error, Result};

/// Default bound on the number of formulas an enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 250_000;

/// Every formula of depth at most `max_depth` over `sig` whose variables are
/// among `x1..x{max_var}`, in canonical order.
pub fn enumerate_formulas(sig: &Signature, max_depth: usize, max_var: u64) -> Result<Vec<Formula>> {
    enumerate_formulas_capped(sig, max_depth, max_var, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_formulas_capped(sig: &Signature, max_depth: usize, max_var: u64, cap: usize) -> Result<Vec<Formula>> {
    if max_depth == 0 || max_var == 0 {
        return Err(Error::Config("enumeration needs depth >= 1 and at least one variable".into()));
    }
    let mut leaves: Vec<Formula> = (1..=max_var).map(Formula::var).collect();
    leaves.extend(sig.constants().cloned().map(Formula::constant));
    let mut current = leaves.clone();
    for _ in 1..max_depth {
        let n = current.len() as u128;
        let projected: u128 = leaves.len() as u128
            + sig.symbols().filter(|s| s.arity() > 0).map(|s| n.saturating_pow(s.arity() as u32)).sum::<u128>();
        if projected > cap as u128 {
            return Err(Error::CapExceeded(format!("enumeration would produce {projected} formulas (cap {cap})")));
        }
        let mut next = leaves.clone();
        for sym in sig.symbols().filter(|s| s.arity() > 0) {
            let k = sym.arity();
            let mut idx = vec![0usize; k];
            'tuples: loop {
                next.push(Formula::app(sym.clone(), idx.iter().map(|&i| current[i].clone()).collect()));
                for pos in (0..k).rev() {
                    idx[pos] += 1;
                    if idx[pos] < current.len() {
                        continue 'tuples;
                    }
                    idx[pos] = 0;
                }
                break;
            }
        }
        current = next;
    }
    current.sort();
    current.dedup();
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(decls: &[(&str, usize)]) -> Signature {
        Signature::new(decls.iter().copied()).unwrap()
    }

    fn show(fs: &[Formula]) -> Vec<String> {
        fs.iter().map(|f| f.to_string()).collect()
    }

    #[test]
    fn small_cases() {
        assert_eq!(show(&enumerate_formulas(&sig(&[("not", 1)]), 2, 1).unwrap()), ["x1", "not(x1)"]);
        assert_eq!(
            show(&enumerate_formulas(&sig(&[("bot", 0), ("top", 0), ("not", 1)]), 1, 2).unwrap()),
            ["x1", "x2", "bot", "top"]
        );
        let cpl = sig(&[("bot", 0), ("not", 1), ("imp", 2)]);
        assert_eq!(
            show(&enumerate_formulas(&cpl, 2, 1).unwrap()),
            ["x1", "bot", "not(x1)", "not(bot)", "imp(x1, x1)", "imp(x1, bot)", "imp(bot, x1)", "imp(bot, bot)"]
        );
    }

    #[test]
    fn cap_and_config() {
        let cpl = sig(&[("bot", 0), ("not", 1), ("imp", 2)]);
        assert!(matches!(enumerate_formulas_capped(&cpl, 3, 2, 100), Err(Error::CapExceeded(_))));
        assert!(matches!(enumerate_formulas(&cpl, 0, 2), Err(Error::Config(_))));
    }
}
