//! Reverse-mode automatic differentiation over dense matrices.
//!
//! A [`Tape`] records the forward pass as a topologically ordered node list;
//! [`Tape::backward`] replays it in reverse, accumulating gradients into every
//! node. Only the operations the model needs are provided. Sparse matrices
//! enter through [`Tape::spmm`] and are constants: graphs are fixed inputs,
//! never trained, so no gradient is produced for them.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::nd::{DenseMatrix, SparseMatrix};

/// Inputs to the natural log are clamped to this floor so saturated
/// probabilities cannot produce `-inf`.
pub const LOG_FLOOR: f64 = 1e-12;

/// Handle to a tape node. Only meaningful for the tape that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

enum Op {
    Leaf,
    MatMul(usize, usize),
    Spmm(Rc<SparseMatrix>, usize),
    Relu(usize),
    SoftmaxRows(usize),
    ConcatCols(Vec<usize>),
    RowSelect(usize, Vec<usize>),
    AddRowVec(usize, usize),
    Scale(usize, f64),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Ln(usize),
    Sum(usize),
    Mean(usize),
}

struct Node {
    op: Op,
    value: DenseMatrix,
    grad: DenseMatrix,
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op, value: DenseMatrix) -> Var {
        let grad = DenseMatrix::zeros(value.rows(), value.cols());
        self.nodes.push(Node { op, value, grad });
        Var(self.nodes.len() - 1)
    }

    /// Registers a leaf (input, parameter or constant).
    pub fn leaf(&mut self, value: DenseMatrix) -> Var {
        self.push(Op::Leaf, value)
    }

    pub fn value(&self, v: Var) -> &DenseMatrix {
        &self.nodes[v.0].value
    }

    /// Gradient accumulated by the most recent [`Tape::backward`] call.
    pub fn grad(&self, v: Var) -> &DenseMatrix {
        &self.nodes[v.0].grad
    }

    /// Value of a 1x1 node.
    pub fn scalar(&self, v: Var) -> Result<f64> {
        let m = self.value(v);
        if m.shape() != (1, 1) {
            return Err(Error::Validation(format!(
                "expected scalar node, found {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(m.get(0, 0))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes[a.0].value.matmul(&self.nodes[b.0].value)?;
        Ok(self.push(Op::MatMul(a.0, b.0), value))
    }

    /// Sparse-times-dense product with a constant left factor.
    pub fn spmm(&mut self, s: Rc<SparseMatrix>, b: Var) -> Result<Var> {
        let value = s.mul_dense(&self.nodes[b.0].value)?;
        Ok(self.push(Op::Spmm(s, b.0), value))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let value = self.nodes[a.0].value.map(|x| x.max(0.0));
        self.push(Op::Relu(a.0), value)
    }

    /// Numerically stable row-wise softmax.
    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let input = &self.nodes[a.0].value;
        let mut value = input.clone();
        for i in 0..value.rows() {
            let row = value.row_mut(i);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for x in row.iter_mut() {
                *x = (*x - max).exp();
                total += *x;
            }
            for x in row.iter_mut() {
                *x /= total;
            }
        }
        self.push(Op::SoftmaxRows(a.0), value)
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        if parts.is_empty() {
            return Err(Error::Validation("concat_cols of zero parts".into()));
        }
        let rows = self.nodes[parts[0].0].value.rows();
        for p in parts {
            let shape = self.nodes[p.0].value.shape();
            if shape.0 != rows {
                return Err(Error::dim(
                    "concat_cols",
                    self.nodes[parts[0].0].value.shape(),
                    shape,
                ));
            }
        }
        let total_cols: usize = parts.iter().map(|p| self.nodes[p.0].value.cols()).sum();
        let mut value = DenseMatrix::zeros(rows, total_cols);
        let mut offset = 0;
        for p in parts {
            let part = &self.nodes[p.0].value;
            for i in 0..rows {
                let src = part.row(i);
                value.row_mut(i)[offset..offset + src.len()].copy_from_slice(src);
            }
            offset += part.cols();
        }
        Ok(self.push(Op::ConcatCols(parts.iter().map(|p| p.0).collect()), value))
    }

    /// Gathers the listed rows; duplicates are allowed and their gradients
    /// accumulate back into the shared source row.
    pub fn row_select(&mut self, a: Var, indices: &[usize]) -> Result<Var> {
        let src = &self.nodes[a.0].value;
        for &i in indices {
            if i >= src.rows() {
                return Err(Error::Index {
                    what: "row_select rows",
                    index: i,
                    len: src.rows(),
                });
            }
        }
        let mut value = DenseMatrix::zeros(indices.len(), src.cols());
        for (out_row, &i) in indices.iter().enumerate() {
            value.row_mut(out_row).copy_from_slice(src.row(i));
        }
        Ok(self.push(Op::RowSelect(a.0, indices.to_vec()), value))
    }

    /// Adds a 1xC bias row to every row of an NxC matrix.
    pub fn add_row_vec(&mut self, a: Var, bias: Var) -> Result<Var> {
        let (m, b) = (&self.nodes[a.0].value, &self.nodes[bias.0].value);
        if b.rows() != 1 || b.cols() != m.cols() {
            return Err(Error::dim("add_row_vec", m.shape(), b.shape()));
        }
        let mut value = m.clone();
        for i in 0..value.rows() {
            for (x, bv) in value.row_mut(i).iter_mut().zip(b.row(0)) {
                *x += bv;
            }
        }
        Ok(self.push(Op::AddRowVec(a.0, bias.0), value))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let value = self.nodes[a.0].value.map(|x| c * x);
        self.push(Op::Scale(a.0, c), value)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes[a.0]
            .value
            .zip_map(&self.nodes[b.0].value, |x, y| x + y)?;
        Ok(self.push(Op::Add(a.0, b.0), value))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes[a.0]
            .value
            .zip_map(&self.nodes[b.0].value, |x, y| x - y)?;
        Ok(self.push(Op::Sub(a.0, b.0), value))
    }

    /// Elementwise (Hadamard) product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes[a.0]
            .value
            .zip_map(&self.nodes[b.0].value, |x, y| x * y)?;
        Ok(self.push(Op::Mul(a.0, b.0), value))
    }

    /// Natural log of `max(x, LOG_FLOOR)`.
    pub fn ln(&mut self, a: Var) -> Var {
        let value = self.nodes[a.0].value.map(|x| x.max(LOG_FLOOR).ln());
        self.push(Op::Ln(a.0), value)
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let total = self.nodes[a.0].value.sum();
        self.push(Op::Sum(a.0), DenseMatrix::filled(1, 1, total))
    }

    pub fn mean(&mut self, a: Var) -> Var {
        let m = &self.nodes[a.0].value;
        debug_assert!(!m.is_empty());
        let mean = m.sum() / m.len() as f64;
        self.push(Op::Mean(a.0), DenseMatrix::filled(1, 1, mean))
    }

    /// Seeds `loss` with gradient 1 and accumulates gradients into every node
    /// reachable from it. Accumulators are reset first, so repeated calls are
    /// idempotent.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        if self.nodes[loss.0].value.shape() != (1, 1) {
            let (r, c) = self.nodes[loss.0].value.shape();
            return Err(Error::Validation(format!(
                "backward requires a 1x1 loss, found {r}x{c}"
            )));
        }
        for node in &mut self.nodes {
            node.grad.fill(0.0);
        }
        self.nodes[loss.0].grad.set(0, 0, 1.0);

        for i in (0..=loss.0).rev() {
            // Inputs strictly precede their consumers, so the upstream
            // gradient is final by the time we visit node i.
            let g = self.nodes[i].grad.clone();
            if g.data().iter().all(|v| *v == 0.0) {
                continue;
            }
            match &self.nodes[i].op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let (a, b) = (*a, *b);
                    let ga = g.matmul_nt(&self.nodes[b].value)?;
                    let gb = self.nodes[a].value.matmul_tn(&g)?;
                    self.nodes[a].grad.axpy(1.0, &ga)?;
                    self.nodes[b].grad.axpy(1.0, &gb)?;
                }
                Op::Spmm(s, b) => {
                    let b = *b;
                    let gb = s.transpose_mul_dense(&g)?;
                    self.nodes[b].grad.axpy(1.0, &gb)?;
                }
                Op::Relu(a) => {
                    let a = *a;
                    let mask = self.nodes[a].value.map(|x| if x > 0.0 { 1.0 } else { 0.0 });
                    let ga = g.zip_map(&mask, |gv, m| gv * m)?;
                    self.nodes[a].grad.axpy(1.0, &ga)?;
                }
                Op::SoftmaxRows(a) => {
                    let a = *a;
                    let y = &self.nodes[i].value;
                    let mut ga = DenseMatrix::zeros(y.rows(), y.cols());
                    for r in 0..y.rows() {
                        let (y_row, g_row) = (y.row(r), g.row(r));
                        let dot: f64 = y_row.iter().zip(g_row).map(|(yv, gv)| yv * gv).sum();
                        for (out, (yv, gv)) in
                            ga.row_mut(r).iter_mut().zip(y_row.iter().zip(g_row))
                        {
                            *out = yv * (gv - dot);
                        }
                    }
                    self.nodes[a].grad.axpy(1.0, &ga)?;
                }
                Op::ConcatCols(parts) => {
                    let parts = parts.clone();
                    let mut offset = 0;
                    for p in parts {
                        let cols = self.nodes[p].value.cols();
                        let rows = self.nodes[p].value.rows();
                        let mut gp = DenseMatrix::zeros(rows, cols);
                        for r in 0..rows {
                            gp.row_mut(r).copy_from_slice(&g.row(r)[offset..offset + cols]);
                        }
                        self.nodes[p].grad.axpy(1.0, &gp)?;
                        offset += cols;
                    }
                }
                Op::RowSelect(a, indices) => {
                    let a = *a;
                    let indices = indices.clone();
                    for (out_row, src_row) in indices.into_iter().enumerate() {
                        let g_row = g.row(out_row).to_vec();
                        for (dst, gv) in self.nodes[a].grad.row_mut(src_row).iter_mut().zip(g_row)
                        {
                            *dst += gv;
                        }
                    }
                }
                Op::AddRowVec(a, bias) => {
                    let (a, bias) = (*a, *bias);
                    self.nodes[a].grad.axpy(1.0, &g)?;
                    let mut col_sums = vec![0.0; g.cols()];
                    for r in 0..g.rows() {
                        for (acc, gv) in col_sums.iter_mut().zip(g.row(r)) {
                            *acc += gv;
                        }
                    }
                    for (dst, s) in self.nodes[bias].grad.row_mut(0).iter_mut().zip(col_sums) {
                        *dst += s;
                    }
                }
                Op::Scale(a, c) => {
                    let (a, c) = (*a, *c);
                    self.nodes[a].grad.axpy(c, &g)?;
                }
                Op::Add(a, b) => {
                    let (a, b) = (*a, *b);
                    self.nodes[a].grad.axpy(1.0, &g)?;
                    self.nodes[b].grad.axpy(1.0, &g)?;
                }
                Op::Sub(a, b) => {
                    let (a, b) = (*a, *b);
                    self.nodes[a].grad.axpy(1.0, &g)?;
                    self.nodes[b].grad.axpy(-1.0, &g)?;
                }
                Op::Mul(a, b) => {
                    let (a, b) = (*a, *b);
                    let ga = g.zip_map(&self.nodes[b].value, |gv, y| gv * y)?;
                    let gb = g.zip_map(&self.nodes[a].value, |gv, x| gv * x)?;
                    self.nodes[a].grad.axpy(1.0, &ga)?;
                    self.nodes[b].grad.axpy(1.0, &gb)?;
                }
                Op::Ln(a) => {
                    let a = *a;
                    // Zero slope inside the clamp region.
                    let ga = g.zip_map(
                        &self.nodes[a].value.map(|x| if x > LOG_FLOOR { 1.0 / x } else { 0.0 }),
                        |gv, d| gv * d,
                    )?;
                    self.nodes[a].grad.axpy(1.0, &ga)?;
                }
                Op::Sum(a) => {
                    let a = *a;
                    let gv = g.get(0, 0);
                    for dst in self.nodes[a].grad.data_mut() {
                        *dst += gv;
                    }
                }
                Op::Mean(a) => {
                    let a = *a;
                    let gv = g.get(0, 0) / self.nodes[a].value.len() as f64;
                    for dst in self.nodes[a].grad.data_mut() {
                        *dst += gv;
                    }
                }
            }
        }
        Ok(())
    }
}
