use crate::error::{config, Result};
use crate::prob::check_pmf;
use crate::sets::{SenderSet, MAX_SENDERS};

/// A finite alphabet `{0, .., size-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return config("alphabet size must be at least 1");
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }
}

/// A `(K, L)` discrete memoryless interference network with demand sets.
///
/// The channel is a dense table over `(x1, .., xK, y1, .., yL)` in row-major
/// order with the output indices varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    inputs: Vec<Alphabet>,
    outputs: Vec<Alphabet>,
    channel: Vec<f64>,
    demands: Vec<SenderSet>,
}

impl NetworkSpec {
    pub fn new(
        input_sizes: &[usize],
        output_sizes: &[usize],
        channel: Vec<f64>,
        demands: Vec<SenderSet>,
    ) -> Result<Self> {
        let k = input_sizes.len();
        if k == 0 || k > MAX_SENDERS {
            return config(format!("sender count {k} outside 1..={MAX_SENDERS}"));
        }
        if output_sizes.is_empty() {
            return config("at least one receiver is required");
        }
        let inputs = input_sizes.iter().map(|&s| Alphabet::new(s)).collect::<Result<Vec<_>>>()?;
        let outputs = output_sizes.iter().map(|&s| Alphabet::new(s)).collect::<Result<Vec<_>>>()?;
        let n_in = checked_product(input_sizes)?;
        let n_out = checked_product(output_sizes)?;
        let expected = n_in
            .checked_mul(n_out)
            .filter(|&n| n <= crate::max_table_entries())
            .ok_or_else(|| crate::Error::Config("channel table exceeds the dense-table cap".into()))?;
        if channel.len() != expected {
            return config(format!(
                "channel has {} entries, expected {} = {} input tuples x {} output tuples",
                channel.len(),
                expected,
                n_in,
                n_out
            ));
        }
        for x in 0..n_in {
            check_pmf(&format!("channel row for input tuple #{x}"), &channel[x * n_out..(x + 1) * n_out])?;
        }
        if demands.len() != output_sizes.len() {
            return config(format!("{} demand sets for {} receivers", demands.len(), output_sizes.len()));
        }
        for (l, d) in demands.iter().enumerate() {
            if d.is_empty() {
                return config(format!("demand set of receiver {} is empty", l + 1));
            }
            if !d.is_subset(SenderSet::full(k)) {
                return config(format!("demand set {d} of receiver {} names a missing sender", l + 1));
            }
        }
        Ok(NetworkSpec { inputs, outputs, channel, demands })
    }

    /// Sender count `K`.
    pub fn senders(&self) -> usize {
        self.inputs.len()
    }

    /// Receiver count `L`.
    pub fn receivers(&self) -> usize {
        self.outputs.len()
    }

    pub fn input_sizes(&self) -> Vec<usize> {
        self.inputs.iter().map(|a| a.size()).collect()
    }

    pub fn output_sizes(&self) -> Vec<usize> {
        self.outputs.iter().map(|a| a.size()).collect()
    }

    pub fn demands(&self) -> &[SenderSet] {
        &self.demands
    }

    pub fn demand(&self, l: usize) -> SenderSet {
        self.demands[l]
    }

    pub fn channel(&self) -> &[f64] {
        &self.channel
    }

    pub fn input_tuples(&self) -> usize {
        self.inputs.iter().map(|a| a.size()).product()
    }

    pub fn output_tuples(&self) -> usize {
        self.outputs.iter().map(|a| a.size()).product()
    }

    /// Row-major index of an input tuple.
    pub fn input_index(&self, xs: &[usize]) -> usize {
        mixed_radix_index(xs, self.inputs.iter().map(|a| a.size()))
    }

    /// The conditional pmf over output tuples for an input tuple index.
    pub fn channel_row(&self, x_index: usize) -> &[f64] {
        let n_out = self.output_tuples();
        &self.channel[x_index * n_out..(x_index + 1) * n_out]
    }

    /// Marginal channel `p(y_l | x1..xK)` as a table indexed
    /// `[x_index * |Y_l| + y]`.
    pub fn receiver_channel(&self, l: usize) -> Vec<f64> {
        let sizes = self.output_sizes();
        let ny = sizes[l];
        let inner: usize = sizes[l + 1..].iter().product();
        let n_out = self.output_tuples();
        let mut out = vec![0.0; self.input_tuples() * ny];
        for x in 0..self.input_tuples() {
            let row = self.channel_row(x);
            for (yi, &p) in row.iter().enumerate() {
                let y = yi / inner % ny;
                out[x * ny + y] += p;
            }
            debug_assert_eq!(row.len(), n_out);
        }
        out
    }

    /// A copy with different demand sets.
    pub fn with_demands(&self, demands: Vec<SenderSet>) -> Result<Self> {
        NetworkSpec::new(&self.input_sizes(), &self.output_sizes(), self.channel.clone(), demands)
    }
}

/// Time-sharing pmf `p(q)` and per-sender conditionals `p(x_k | q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InputEnsemble {
    q: Alphabet,
    p_q: Vec<f64>,
    /// Per sender, a `q_size x |X_k|` row-major table.
    p_x_given_q: Vec<Vec<f64>>,
    x_sizes: Vec<usize>,
}

impl InputEnsemble {
    pub fn new(p_q: Vec<f64>, p_x_given_q: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let q = Alphabet::new(p_q.len())?;
        check_pmf("p_q", &p_q)?;
        let mut tables = Vec::with_capacity(p_x_given_q.len());
        let mut x_sizes = Vec::with_capacity(p_x_given_q.len());
        for (k, rows) in p_x_given_q.into_iter().enumerate() {
            if rows.len() != q.size() {
                return config(format!(
                    "p_x_given_q[{}] has {} rows, expected q_size = {}",
                    k + 1,
                    rows.len(),
                    q.size()
                ));
            }
            let width = rows[0].len();
            Alphabet::new(width)?;
            let mut flat = Vec::with_capacity(width * rows.len());
            for (qi, row) in rows.iter().enumerate() {
                if row.len() != width {
                    return config(format!("p_x_given_q[{}] has ragged rows", k + 1));
                }
                check_pmf(&format!("p_x_given_q[{}][q={qi}]", k + 1), row)?;
                flat.extend_from_slice(row);
            }
            tables.push(flat);
            x_sizes.push(width);
        }
        Ok(InputEnsemble { q, p_q, p_x_given_q: tables, x_sizes })
    }

    /// Every sender uses the same input pmf and `|Q| = 1`.
    pub fn iid(p_x: &[Vec<f64>]) -> Result<Self> {
        InputEnsemble::new(vec![1.0], p_x.iter().map(|p| vec![p.clone()]).collect())
    }

    /// Uniform inputs with `|Q| = 1`.
    pub fn uniform(x_sizes: &[usize]) -> Result<Self> {
        let p: Vec<Vec<f64>> = x_sizes.iter().map(|&s| vec![1.0 / s as f64; s]).collect();
        InputEnsemble::iid(&p)
    }

    pub fn q_size(&self) -> usize {
        self.q.size()
    }

    pub fn p_q(&self) -> &[f64] {
        &self.p_q
    }

    pub fn senders(&self) -> usize {
        self.x_sizes.len()
    }

    pub fn x_sizes(&self) -> &[usize] {
        &self.x_sizes
    }

    /// `p(x_k | q)` as a slice over `x_k`.
    pub fn p_x_given_q(&self, k: usize, q: usize) -> &[f64] {
        let w = self.x_sizes[k];
        &self.p_x_given_q[k][q * w..(q + 1) * w]
    }

    /// Rows `[q][x]` for sender `k`, as ingested.
    pub fn conditional_rows(&self, k: usize) -> Vec<Vec<f64>> {
        (0..self.q_size()).map(|q| self.p_x_given_q(k, q).to_vec()).collect()
    }
}

/// A deterministic map from a tuple of virtual inputs to one physical input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualMap {
    /// Virtual input indices feeding this physical input, in table order.
    pub inputs: Vec<usize>,
    /// Row-major lookup table over the listed virtual inputs.
    pub table: Vec<usize>,
}

impl VirtualMap {
    pub fn identity(virtual_input: usize, size: usize) -> Self {
        VirtualMap { inputs: vec![virtual_input], table: (0..size).collect() }
    }
}

/// Merge deterministic input maps into the channel, yielding a network over
/// the virtual inputs with `p(y | u) = p_base(y | x1(u..), .., xK'(u..))`.
pub fn compose_virtual_channel(
    base: &NetworkSpec,
    virtual_sizes: &[usize],
    maps: &[VirtualMap],
    demands: Vec<SenderSet>,
) -> Result<NetworkSpec> {
    let phys = base.input_sizes();
    if maps.len() != phys.len() {
        return config(format!("{} maps for {} physical inputs", maps.len(), phys.len()));
    }
    for (k, m) in maps.iter().enumerate() {
        let dom: Vec<usize> = m
            .inputs
            .iter()
            .map(|&u| {
                virtual_sizes
                    .get(u)
                    .copied()
                    .ok_or_else(|| crate::Error::Config(format!("map {} names missing virtual input {}", k + 1, u + 1)))
            })
            .collect::<Result<_>>()?;
        let expected: usize = dom.iter().product();
        if m.table.len() != expected {
            return config(format!("map {} has {} entries, expected {expected}", k + 1, m.table.len()));
        }
        if let Some(bad) = m.table.iter().find(|&&x| x >= phys[k]) {
            return config(format!(
                "map {} outputs symbol {bad}, outside physical alphabet of size {}",
                k + 1,
                phys[k]
            ));
        }
    }
    let n_virtual = checked_product(virtual_sizes)?;
    let n_out = base.output_tuples();
    if n_virtual.saturating_mul(n_out) > crate::max_table_entries() {
        return Err(crate::Error::Config("composed channel exceeds the dense-table cap".into()));
    }
    let mut channel = Vec::with_capacity(n_virtual * n_out);
    let mut u = vec![0usize; virtual_sizes.len()];
    let mut x = vec![0usize; phys.len()];
    for _ in 0..n_virtual {
        for (k, m) in maps.iter().enumerate() {
            let idx = mixed_radix_index_of(&m.inputs, &u, virtual_sizes);
            x[k] = m.table[idx];
        }
        channel.extend_from_slice(base.channel_row(base.input_index(&x)));
        increment(&mut u, virtual_sizes);
    }
    NetworkSpec::new(virtual_sizes, &base.output_sizes(), channel, demands)
}

fn checked_product(sizes: &[usize]) -> Result<usize> {
    sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .ok_or_else(|| crate::Error::Config("alphabet product overflows".into()))
}

pub(crate) fn mixed_radix_index(digits: &[usize], sizes: impl IntoIterator<Item = usize>) -> usize {
    digits.iter().zip(sizes).fold(0, |acc, (&d, s)| acc * s + d)
}

fn mixed_radix_index_of(which: &[usize], digits: &[usize], sizes: &[usize]) -> usize {
    which.iter().fold(0, |acc, &i| acc * sizes[i] + digits[i])
}

/// Odometer increment in row-major order (last digit fastest).
pub(crate) fn increment(digits: &mut [usize], sizes: &[usize]) {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < sizes[i] {
            return;
        }
        digits[i] = 0;
    }
}
