use crate::error::{Error, Result};

/// Batch mean of squared L2 errors and its gradient w.r.t. `pred`.
pub fn mse_loss(pred: &[Vec<f64>], target: &[Vec<f64>]) -> Result<(f64, Vec<Vec<f64>>)> {
    if pred.is_empty() {
        return Err(Error::Contract("MSE over an empty batch".into()));
    }
    if pred.len() != target.len() {
        return Err(Error::Contract(format!(
            "batch sizes differ: {} predictions, {} targets",
            pred.len(),
            target.len()
        )));
    }
    let n = pred.len() as f64;
    let mut loss = 0.0;
    let mut grads = Vec::with_capacity(pred.len());
    for (p, t) in pred.iter().zip(target) {
        if p.len() != t.len() {
            return Err(Error::Contract(format!(
                "row widths differ: {} vs {}",
                p.len(),
                t.len()
            )));
        }
        let g: Vec<f64> = p.iter().zip(t).map(|(a, b)| 2.0 * (a - b) / n).collect();
        loss += p.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        grads.push(g);
    }
    Ok((loss / n, grads))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let (l, _) = mse_loss(&[vec![0.3, -0.1]], &[vec![0.3, -0.1]]).unwrap();
        assert_eq!(l, 0.0);
        let (l, g) = mse_loss(&[vec![0.0, 0.0]], &[vec![1.0, 1.0]]).unwrap();
        assert_eq!(l, 2.0);
        assert_eq!(g, vec![vec![-2.0, -2.0]]);
        let (l, _) = mse_loss(
            &[vec![1.0, 1.0], vec![5.0, 5.0]],
            &[vec![0.0, 0.0], vec![5.0, 5.0]],
        )
        .unwrap();
        assert_eq!(l, 1.0);
    }

    #[test]
    fn empty_and_ragged() {
        assert!(mse_loss(&[], &[]).is_err());
        assert!(mse_loss(&[vec![1.0]], &[vec![1.0, 2.0]]).is_err());
        assert!(mse_loss(&[vec![1.0]], &[]).is_err());
    }
}
