//! Square Gray-coded QAM alphabets and the modulo-τ receiver fold.
//!
//! Symbols sit on the unnormalized odd-integer lattice (spacing 2). The
//! symbol index is the bit pattern read MSB first: the high half of the bits
//! selects the in-phase level, the low half the quadrature level, each
//! through a reflected Gray code.

use crate::error::{Error, Result};
use crate::numerics::C64;

/// Distance between neighbouring levels on each axis.
pub const SPACING: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    bits_per_symbol: usize,
    symbols: Vec<C64>,
    c_max: f64,
    tau: f64,
}

/// Position along one axis (0 = most negative level) for a Gray label.
fn gray_decode(mut g: usize) -> usize {
    let mut p = 0;
    while g != 0 {
        p ^= g;
        g >>= 1;
    }
    p
}

impl Constellation {
    pub fn new(order: usize) -> Result<Self> {
        if !matches!(order, 4 | 16 | 64) {
            return Err(Error::UnsupportedOrder(order));
        }
        let bits_per_symbol = order.trailing_zeros() as usize;
        let axis_bits = bits_per_symbol / 2;
        let side = 1usize << axis_bits;
        let level = |pos: usize| SPACING * pos as f64 - (side as f64 - 1.0);

        let symbols: Vec<C64> = (0..order)
            .map(|idx| {
                let i_label = idx >> axis_bits;
                let q_label = idx & (side - 1);
                C64::new(level(gray_decode(i_label)), level(gray_decode(q_label)))
            })
            .collect();
        let c_max = symbols.iter().map(|s| s.norm()).fold(0.0, f64::max);
        let tau = 2.0 * (c_max + SPACING / 2.0);
        Ok(Self {
            order,
            bits_per_symbol,
            symbols,
            c_max,
            tau,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn symbols(&self) -> &[C64] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> C64 {
        self.symbols[index]
    }

    pub fn delta(&self) -> f64 {
        SPACING
    }

    /// Modulus of the largest symbol.
    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    /// Modulo period `2 (c_max + Δ/2)`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn index_to_bits(&self, index: usize) -> Vec<bool> {
        (0..self.bits_per_symbol)
            .rev()
            .map(|b| (index >> b) & 1 == 1)
            .collect()
    }

    pub fn bits_to_index(&self, bits: &[bool]) -> Result<usize> {
        if bits.len() != self.bits_per_symbol {
            return Err(Error::WrongBitCount {
                expected: self.bits_per_symbol,
                actual: bits.len(),
            });
        }
        Ok(bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize))
    }

    pub fn bits_to_symbol(&self, bits: &[bool]) -> Result<C64> {
        Ok(self.symbols[self.bits_to_index(bits)?])
    }

    pub fn symbol_to_bits(&self, index: usize) -> Vec<bool> {
        self.index_to_bits(index)
    }

    /// Minimum-distance symbol; ties go to the lowest index.
    pub fn nearest_symbol(&self, y: C64) -> (usize, Vec<bool>) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, s) in self.symbols.iter().enumerate() {
            let d = (y - s).norm_sqr();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        (best, self.index_to_bits(best))
    }

    /// Removes integer multiples of τ from each axis. Rounding is half away
    /// from zero.
    pub fn modulo_tau(&self, y: C64) -> C64 {
        let t = self.tau;
        C64::new(y.re - t * (y.re / t).round(), y.im - t * (y.im / t).round())
    }
}

pub fn make_constellation(order: usize) -> Result<Constellation> {
    Constellation::new(order)
}
