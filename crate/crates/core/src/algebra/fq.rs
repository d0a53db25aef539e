//! Arithmetic in the finite field F_q, q = p^e, through precomputed tables.
//!
//! Field contexts are interned: [`Fq::get`] returns a `&'static Fq`, so
//! elements are `Copy` and carry their field as a pointer. An element stores
//! its digit index, the integer c_0 + c_1 p + ... + c_{e-1} p^{e-1} built
//! from its coordinates in the polynomial basis 1, x, ..., x^{e-1} of
//! F_p[x]/(f). The modulus f is canonical: among monic irreducibles of
//! degree e it has the fewest nonzero terms, ties broken by the smallest
//! coefficient sequence read from the constant term upward. Multiplication
//! uses discrete-log tables with respect to a fixed generator, the element
//! of smallest digit index with full multiplicative order.

use std::fmt;
use std::sync::{Mutex, OnceLock};

use crate::error::AlgebraError;

/// Largest supported field order.
pub const MAX_Q: u64 = 1 << 16;

/// A finite field of order q = p^e together with its arithmetic tables.
pub struct Fq {
    p: u64,
    e: u32,
    q: u64,
    /// Modulus coefficients c_0..c_e (monic, length e+1); empty when e = 1.
    modulus: Vec<u64>,
    /// Digit index of the table generator g.
    generator: u32,
    /// log[d] for digit index d >= 1: exponent k with g^k = d. log[0] unused.
    log: Vec<u32>,
    /// exp[k] = digit index of g^k for 0 <= k < q - 1.
    exp: Vec<u32>,
    /// Full addition table (q*q entries) when q is small; otherwise empty.
    add_table: Vec<u32>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq({}^{})", self.p, self.e)
    }
}

// Fields are interned, so identity is pointer identity.
impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
    }
}

impl Eq for Fq {}

/// An element of an interned field, stored as a digit index.
#[derive(Clone, Copy)]
pub struct FqElem {
    fq: &'static Fq,
    val: u32,
}

const ADD_TABLE_MAX_Q: u64 = 256;

static REGISTRY: OnceLock<Mutex<Vec<&'static Fq>>> = OnceLock::new();

impl Fq {
    /// Intern and return the field of order p^e.
    pub fn get(p: u64, e: u32) -> Result<&'static Fq, AlgebraError> {
        if e == 0 {
            return Err(AlgebraError::ZeroExtensionDegree);
        }
        if !is_prime(p) {
            return Err(AlgebraError::NonPrimeCharacteristic(p));
        }
        match (p as u128).checked_pow(e) {
            Some(q) if q <= MAX_Q as u128 => {}
            _ => return Err(AlgebraError::FieldTooLarge { p, e }),
        }
        let registry = REGISTRY.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = registry.lock().expect("field registry poisoned");
        if let Some(fq) = guard.iter().find(|f| f.p == p && f.e == e) {
            return Ok(fq);
        }
        let built: &'static Fq = Box::leak(Box::new(Fq::build(p, e)));
        guard.push(built);
        Ok(built)
    }

    /// Intern the field of order q, factoring q as a prime power.
    pub fn from_order(q: u64) -> Result<&'static Fq, AlgebraError> {
        let (p, e) = prime_power_split(q).ok_or(AlgebraError::NotPrimePower(q))?;
        Fq::get(p, e)
    }

    fn build(p: u64, e: u32) -> Fq {
        let q = p.pow(e);
        let modulus = if e == 1 {
            Vec::new()
        } else {
            canonical_irreducible(p, e)
        };
        let mul_digits = |a: u64, b: u64| -> u64 {
            if e == 1 {
                (a * b) % p
            } else {
                let prod = pmul(&digits_of(a, p, e), &digits_of(b, p, e), p);
                digit_of(&prem(&prod, &modulus, p), p)
            }
        };
        // Generator: smallest digit index with multiplicative order q - 1.
        let ord_factors = factorize(q - 1);
        let mut generator = 0u32;
        'search: for cand in 1..q {
            for &(r, _) in &ord_factors {
                if pow_digits(cand, (q - 1) / r, q, &mul_digits) == 1 {
                    continue 'search;
                }
            }
            generator = cand as u32;
            break;
        }
        debug_assert!(generator != 0 || q == 2);
        if q == 2 {
            generator = 1;
        }
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u64;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = cur as u32;
            log[cur as usize] = k as u32;
            cur = mul_digits(cur, generator as u64);
        }
        debug_assert_eq!(cur, 1, "generator order is not q - 1");
        let add_table = if q <= ADD_TABLE_MAX_Q {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = add_digits(a, b, p, e) as u32;
                }
            }
            table
        } else {
            Vec::new()
        };
        Fq {
            p,
            e,
            q,
            modulus,
            generator,
            log,
            exp,
            add_table,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus coefficients (constant term first) when e > 1.
    pub fn modulus(&self) -> Option<&[u64]> {
        if self.e == 1 {
            None
        } else {
            Some(&self.modulus)
        }
    }

    pub fn zero(&'static self) -> FqElem {
        FqElem { fq: self, val: 0 }
    }

    pub fn one(&'static self) -> FqElem {
        FqElem { fq: self, val: 1 }
    }

    /// The table generator of the multiplicative group.
    pub fn generator(&'static self) -> FqElem {
        FqElem {
            fq: self,
            val: self.generator,
        }
    }

    /// Element with the given digit index.
    pub fn elem(&'static self, digit: u64) -> Result<FqElem, AlgebraError> {
        if digit >= self.q {
            return Err(AlgebraError::DigitOutOfRange { digit, q: self.q });
        }
        Ok(FqElem {
            fq: self,
            val: digit as u32,
        })
    }

    /// Element from base-p coordinates (constant coordinate first, at most e).
    pub fn from_coords(&'static self, coords: &[u64]) -> Result<FqElem, AlgebraError> {
        if coords.len() > self.e as usize {
            return Err(AlgebraError::DigitOutOfRange {
                digit: u64::MAX,
                q: self.q,
            });
        }
        let mut digit = 0u64;
        for &c in coords.iter().rev() {
            if c >= self.p {
                return Err(AlgebraError::DigitOutOfRange { digit: c, q: self.q });
            }
            digit = digit * self.p + c;
        }
        self.elem(digit)
    }

    /// The image of an integer under Z -> F_q (reduction mod p).
    pub fn from_int(&'static self, n: i64) -> FqElem {
        let r = n.rem_euclid(self.p as i64) as u32;
        FqElem { fq: self, val: r }
    }

    /// Binomial coefficient C(n, k) in the prime subfield, by the base-p
    /// digit product rule.
    pub fn binomial(&'static self, n: u64, k: u64) -> FqElem {
        if k > n {
            return self.zero();
        }
        let p = self.p;
        let (mut n, mut k) = (n, k);
        let mut acc = 1u64;
        while k > 0 {
            let (nd, kd) = (n % p, k % p);
            if kd > nd {
                return self.zero();
            }
            acc = acc * small_binomial_mod(nd, kd, p) % p;
            n /= p;
            k /= p;
        }
        self.from_int(acc as i64)
    }

    /// All field elements, zero first, in digit order.
    pub fn elements(&'static self) -> impl Iterator<Item = FqElem> + 'static {
        (0..self.q).map(move |d| FqElem {
            fq: self,
            val: d as u32,
        })
    }
}

impl FqElem {
    pub fn field(&self) -> &'static Fq {
        self.fq
    }

    /// Digit index of this element.
    pub fn digit(&self) -> u64 {
        self.val as u64
    }

    /// Base-p coordinates, constant coordinate first, length e.
    pub fn coords(&self) -> Vec<u64> {
        digits_of(self.val as u64, self.fq.p, self.fq.e)
    }

    pub fn is_zero(&self) -> bool {
        self.val == 0
    }

    pub fn is_one(&self) -> bool {
        self.val == 1
    }

    pub fn add(&self, rhs: &FqElem) -> FqElem {
        let fq = self.same_field(rhs);
        let val = if !fq.add_table.is_empty() {
            fq.add_table[(self.val as u64 * fq.q + rhs.val as u64) as usize]
        } else {
            add_digits(self.val as u64, rhs.val as u64, fq.p, fq.e) as u32
        };
        FqElem { fq, val }
    }

    pub fn neg(&self) -> FqElem {
        let fq = self.fq;
        if fq.p == 2 || self.val == 0 {
            return *self;
        }
        if fq.e == 1 {
            return FqElem {
                fq,
                val: (fq.p - self.val as u64) as u32,
            };
        }
        let coords: Vec<u64> = self
            .coords()
            .iter()
            .map(|&c| if c == 0 { 0 } else { fq.p - c })
            .collect();
        FqElem {
            fq,
            val: digit_of(&coords, fq.p) as u32,
        }
    }

    pub fn sub(&self, rhs: &FqElem) -> FqElem {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &FqElem) -> FqElem {
        let fq = self.same_field(rhs);
        if self.val == 0 || rhs.val == 0 {
            return FqElem { fq, val: 0 };
        }
        let k = (fq.log[self.val as usize] as u64 + fq.log[rhs.val as usize] as u64) % (fq.q - 1);
        FqElem {
            fq,
            val: fq.exp[k as usize],
        }
    }

    pub fn inv(&self) -> Result<FqElem, AlgebraError> {
        if self.val == 0 {
            return Err(AlgebraError::DivisionByZero);
        }
        let fq = self.fq;
        let k = (fq.q - 1 - fq.log[self.val as usize] as u64) % (fq.q - 1);
        Ok(FqElem {
            fq,
            val: fq.exp[k as usize],
        })
    }

    pub fn div(&self, rhs: &FqElem) -> Result<FqElem, AlgebraError> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, k: u64) -> FqElem {
        let fq = self.fq;
        if self.val == 0 {
            return if k == 0 { fq_one(fq) } else { *self };
        }
        let ord = fq.q - 1;
        let k = ((fq.log[self.val as usize] as u128 * k as u128) % ord as u128) as usize;
        FqElem {
            fq,
            val: fq.exp[k],
        }
    }

    /// The m-th Frobenius power x -> x^(p^m).
    pub fn frobenius(&self, m: u32) -> FqElem {
        if self.val == 0 || self.val == 1 {
            return *self;
        }
        let fq = self.fq;
        let ord = fq.q - 1;
        let mut r = 1u64;
        let mut base = fq.p % ord;
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                r = (r * base) % ord;
            }
            base = (base * base) % ord;
            m >>= 1;
        }
        let k = ((fq.log[self.val as usize] as u128 * r as u128) % ord as u128) as usize;
        FqElem {
            fq,
            val: fq.exp[k],
        }
    }

    fn same_field(&self, rhs: &FqElem) -> &'static Fq {
        debug_assert!(
            std::ptr::eq(self.fq, rhs.fq),
            "elements of different fields combined"
        );
        self.fq
    }
}

fn fq_one(fq: &'static Fq) -> FqElem {
    FqElem { fq, val: 1 }
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.fq, other.fq) && self.val == other.val
    }
}

impl Eq for FqElem {}

impl std::hash::Hash for FqElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.fq as *const Fq as usize).hash(state);
        self.val.hash(state);
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.val)
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.val)
    }
}

// ---- Digit and small-polynomial helpers (table construction only) ----

fn digits_of(mut d: u64, p: u64, e: u32) -> Vec<u64> {
    let mut out = vec![0u64; e as usize];
    for slot in out.iter_mut() {
        *slot = d % p;
        d /= p;
    }
    out
}

fn digit_of(coords: &[u64], p: u64) -> u64 {
    let mut d = 0u64;
    for &c in coords.iter().rev() {
        d = d * p + c;
    }
    d
}

fn add_digits(a: u64, b: u64, p: u64, e: u32) -> u64 {
    if p == 2 {
        return a ^ b;
    }
    if e == 1 {
        return (a + b) % p;
    }
    let (da, db) = (digits_of(a, p, e), digits_of(b, p, e));
    let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
    digit_of(&sum, p)
}

fn pow_digits(base: u64, mut k: u64, _q: u64, mul: &impl Fn(u64, u64) -> u64) -> u64 {
    let mut acc = 1u64;
    let mut b = base;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul(acc, b);
        }
        b = mul(b, b);
        k >>= 1;
    }
    acc
}

/// Dense F_p[x] arithmetic on coefficient vectors (constant term first).
fn ptrim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    ptrim(&mut out);
    out
}

/// Remainder of a by the monic polynomial f.
fn prem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    ptrim(&mut r);
    let df = f.len() - 1;
    while r.len() > df {
        // Leading coefficient is nonzero after trimming; cancel it.
        let lead = r[r.len() - 1];
        let shift = r.len() - 1 - df;
        for (j, &fc) in f.iter().enumerate() {
            r[shift + j] = (r[shift + j] + p * p - (lead * fc) % p) % p;
        }
        ptrim(&mut r);
    }
    r
}

fn ppowmod(base: &[u64], mut k: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = prem(base, f, p);
    while k > 0 {
        if k & 1 == 1 {
            acc = prem(&pmul(&acc, &b, p), f, p);
        }
        b = prem(&pmul(&b, &b, p), f, p);
        k >>= 1;
    }
    acc
}

fn psub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = (x + p - y) % p;
    }
    ptrim(&mut out);
    out
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    ptrim(&mut x);
    ptrim(&mut y);
    while !y.is_empty() {
        // Reduce x mod y after making y monic.
        let lead = *y.last().unwrap();
        let linv = pow_mod_u64(lead, p - 2, p);
        let monic: Vec<u64> = y.iter().map(|&c| (c * linv) % p).collect();
        let r = prem(&x, &monic, p);
        x = y;
        y = r;
    }
    x
}

/// C(n, k) mod p for n, k < p, via factorials and Fermat inverses.
fn small_binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    debug_assert!(k <= n && n < p);
    let fact = |m: u64| (1..=m).fold(1u64, |acc, x| acc * x % p);
    let inv = |x: u64| pow_mod_u64(x, p - 2, p);
    if p == 2 {
        return 1;
    }
    fact(n) * inv(fact(k)) % p * inv(fact(n - k)) % p
}

fn pow_mod_u64(mut b: u64, mut k: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while k > 0 {
        if k & 1 == 1 {
            acc = (acc * b) % m;
        }
        b = (b * b) % m;
        k >>= 1;
    }
    acc
}

fn is_irreducible(f: &[u64], p: u64, e: u32) -> bool {
    debug_assert_eq!(f.len(), e as usize + 1);
    if f[0] == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    // x^(p^e) == x mod f
    let mut fr = x.clone();
    for _ in 0..e {
        fr = ppowmod(&fr, p, f, p);
    }
    if prem(&psub(&fr, &x, p), f, p) != Vec::<u64>::new() {
        return false;
    }
    for (r, _) in factorize(e as u64) {
        let mut fr = x.clone();
        for _ in 0..(e as u64 / r) {
            fr = ppowmod(&fr, p, f, p);
        }
        let g = pgcd(f, &psub(&fr, &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Advance a size-k combination drawn from 0..n in lexicographic order.
fn next_combination(positions: &mut [usize], n: usize) -> bool {
    let k = positions.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if positions[i] < n - (k - i) {
            positions[i] += 1;
            for j in i + 1..k {
                positions[j] = positions[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Monic irreducible of degree e with the fewest nonzero terms, ties broken
/// by the lexicographically smallest coefficient vector (constant term most
/// significant).
fn canonical_irreducible(p: u64, e: u32) -> Vec<u64> {
    let n = e as usize;
    for weight in 2..=(n + 1) {
        let low_terms = weight - 1;
        let mut best: Option<Vec<u64>> = None;
        let mut positions: Vec<usize> = (0..low_terms).collect();
        loop {
            let mut values = vec![1u64; low_terms];
            loop {
                let mut cand = vec![0u64; n + 1];
                cand[n] = 1;
                for (slot, &pos) in positions.iter().enumerate() {
                    cand[pos] = values[slot];
                }
                if is_irreducible(&cand, p, e)
                    && best.as_ref().is_none_or(|b| cand[..n] < b[..n])
                {
                    best = Some(cand);
                }
                // Next assignment of nonzero values.
                let mut advanced = false;
                for v in values.iter_mut().rev() {
                    if *v < p - 1 {
                        *v += 1;
                        advanced = true;
                        break;
                    }
                    *v = 1;
                }
                if !advanced {
                    break;
                }
            }
            if !next_combination(&mut positions, n) {
                break;
            }
        }
        if let Some(f) = best {
            return f;
        }
    }
    unreachable!("no irreducible polynomial of degree {e} over F_{p}")
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut m = 0u32;
            while n % d == 0 {
                n /= d;
                m += 1;
            }
            out.push((d, m));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn prime_power_split(q: u64) -> Option<(u64, u32)> {
    let f = factorize(q);
    match f.as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}
