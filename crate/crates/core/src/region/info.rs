use crate::error::{usage, Result};
use crate::prob::{entropy_bits, JointDistribution, Var};
use crate::sets::SenderSet;

/// Cached conditional entropies `H(Y_l | X_A, Q)` for every sender subset `A`,
/// from which every `I(X_T; Y_l | X_C, Q)` is a difference of two entries.
#[derive(Clone, Debug)]
pub struct ReceiverInfo {
    senders: usize,
    receiver: usize,
    cond_entropy: Vec<f64>,
}

impl ReceiverInfo {
    pub fn new(joint: &JointDistribution, receiver: usize) -> Result<Self> {
        let k = joint.senders();
        if receiver >= joint.receivers() {
            return usage(format!("receiver {} does not exist (L = {})", receiver + 1, joint.receivers()));
        }
        let mut vars = vec![Var::Q];
        vars.extend((0..k).map(Var::X));
        vars.push(Var::Y(receiver));
        let sizes: Vec<usize> = vars.iter().map(|&v| joint.size_of(v)).collect::<Result<_>>()?;
        let probs = joint.marginal(&vars)?;
        let reduced = JointDistribution::from_parts(vars, sizes, probs);
        let mut cond_entropy = vec![0.0; 1 << k];
        for a in SenderSet::full(k).subsets() {
            let mut given = vec![Var::Q];
            given.extend(a.iter().map(Var::X));
            let mut with_y = given.clone();
            with_y.push(Var::Y(receiver));
            let h_joint = entropy_bits(&reduced.marginal(&with_y)?);
            let h_given = entropy_bits(&reduced.marginal(&given)?);
            cond_entropy[a.bits() as usize] = h_joint - h_given;
        }
        Ok(ReceiverInfo { senders: k, receiver, cond_entropy })
    }

    pub fn senders(&self) -> usize {
        self.senders
    }

    pub fn receiver(&self) -> usize {
        self.receiver
    }

    /// `H(Y_l | X_A, Q)`.
    pub fn cond_entropy(&self, a: SenderSet) -> f64 {
        self.cond_entropy[a.bits() as usize]
    }

    /// `I(X_T; Y_l | X_C, Q)`; `t` and `c` must be disjoint.
    pub fn mi(&self, t: SenderSet, c: SenderSet) -> f64 {
        debug_assert!(t.intersection(c).is_empty());
        self.cond_entropy(c) - self.cond_entropy(t.union(c))
    }
}
