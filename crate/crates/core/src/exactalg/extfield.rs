use super::field::FqElem;
use super::poly::Poly;

/// Marker for the logarithm of zero.
pub const LOG_ZERO: u32 = u32::MAX;

/// The field F_{p^d} = F_p[X]/(f) for a primitive f, with exponent,
/// logarithm and Zech tables. Elements are coded as Σ c_i p^i.
#[derive(Clone, Debug)]
pub struct ExtField {
    p: u32,
    d: usize,
    order: u32,
    modulus: Poly,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl ExtField {
    pub fn new(p: u32, d: usize) -> ExtField {
        assert!(d >= 1);
        let order = (p as u64).pow(d as u32);
        assert!(order < u32::MAX as u64 / 2, "extension field too large");
        let modulus = find_primitive(p, d);
        let order = order as u32;
        let units = order - 1;
        let mut exp = vec![0u32; units as usize];
        let mut log = vec![LOG_ZERO; order as usize];
        let mut digits = vec![0u32; d];
        digits[0] = 1;
        let top: Vec<u32> = (0..d).map(|i| (p - modulus.coeff(i).value()) % p).collect();
        for k in 0..units {
            let code = encode(&digits, p);
            exp[k as usize] = code;
            log[code as usize] = k;
            // multiply by X and reduce
            let carry = digits[d - 1];
            for i in (1..d).rev() {
                digits[i] = digits[i - 1];
            }
            digits[0] = 0;
            if carry != 0 {
                for i in 0..d {
                    digits[i] = (digits[i] + carry * top[i]) % p;
                }
            }
        }
        let mut zech = vec![LOG_ZERO; units as usize];
        for k in 0..units {
            let c = exp[k as usize];
            let low = c % p;
            let bumped = c - low + (low + 1) % p;
            zech[k as usize] = log[bumped as usize];
        }
        ExtField { p, d, order, modulus, exp, log, zech }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn log(&self, code: u32) -> u32 {
        self.log[code as usize]
    }

    pub fn exp(&self, k: u32) -> u32 {
        self.exp[(k % (self.order - 1)) as usize]
    }

    pub fn from_prime(&self, c: FqElem) -> u32 {
        c.value()
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut scale = 1u32;
        for _ in 0..self.d {
            out += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale = scale.wrapping_mul(p);
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = self.p;
        let mut a = a;
        let mut out = 0u32;
        let mut scale = 1u32;
        for _ in 0..self.d {
            out += ((p - a % p) % p) * scale;
            a /= p;
            scale = scale.wrapping_mul(p);
        }
        out
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % (self.order as u64 - 1)) as usize]
    }

    /// log(g^u + g^w) with LOG_ZERO for zero inputs or outputs.
    pub fn add_logs(&self, u: u32, w: u32) -> u32 {
        if u == LOG_ZERO {
            return w;
        }
        if w == LOG_ZERO {
            return u;
        }
        let m = self.order - 1;
        let diff = (w + m - u) % m;
        let z = self.zech[diff as usize];
        if z == LOG_ZERO {
            LOG_ZERO
        } else {
            ((u as u64 + z as u64) % m as u64) as u32
        }
    }

    /// Evaluates a polynomial over F_p at an element (by code).
    pub fn eval(&self, f: &Poly, x: u32) -> u32 {
        let mut acc = 0u32;
        for i in (0..=f.deg().max(0) as usize).rev() {
            acc = self.add(self.mul(acc, x), f.coeff(i).value());
        }
        acc
    }

    /// Quadratic character via the parity of the logarithm.
    pub fn chi(&self, code: u32) -> i32 {
        match self.log[code as usize] {
            LOG_ZERO => 0,
            k if k % 2 == 0 => 1,
            _ => -1,
        }
    }

    /// Minimal polynomial over F_p of g^k, which has degree equal to the
    /// size of the Frobenius orbit of k.
    pub fn minimal_polynomial(&self, k: u32) -> Poly {
        let m = (self.order - 1) as u64;
        let mut orbit = vec![k as u64 % m];
        loop {
            let next = orbit.last().unwrap() * self.p as u64 % m;
            if next == orbit[0] {
                break;
            }
            orbit.push(next);
        }
        // coefficients as codes, low to high
        let mut coeffs: Vec<u32> = vec![1];
        for &e in &orbit {
            let root = self.exp[e as usize];
            let neg_root = self.neg(root);
            let mut next = vec![0u32; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], c);
                next[i] = self.add(next[i], self.mul(c, neg_root));
            }
            coeffs = next;
        }
        assert!(coeffs.iter().all(|&c| c < self.p), "minimal polynomial not over F_p");
        Poly::from_u32(self.p, coeffs)
    }
}

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

/// First monic primitive polynomial of degree d in code order.
pub fn find_primitive(p: u32, d: usize) -> Poly {
    let units = (p as u64).pow(d as u32) - 1;
    let factors = prime_factors(units);
    let t = Poly::t(p);
    for f in Poly::monics(p, d) {
        if f.coeff(0).is_zero() || !f.is_irreducible() {
            continue;
        }
        let primitive = factors.iter().all(|&r| !t.pow_mod((units / r) as u128, &f).is_one());
        if primitive {
            return f;
        }
    }
    unreachable!("primitive polynomials always exist")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_consistent() {
        let k = ExtField::new(5, 3);
        for a in 1..k.order() {
            assert_eq!(k.exp(k.log(a)), a);
        }
        for a in [0u32, 1, 7, 33, 124] {
            for b in [0u32, 2, 19, 100] {
                let direct = k.log(k.add(a, b));
                assert_eq!(k.add_logs(k.log(a), k.log(b)), direct);
            }
        }
    }

    #[test]
    fn minimal_polynomials_are_irreducible() {
        let k = ExtField::new(5, 2);
        for e in 0..k.order() - 1 {
            let f = k.minimal_polynomial(e);
            assert!(f.is_irreducible());
            assert_eq!(k.eval(&f, k.exp(e)), 0);
        }
    }

    #[test]
    fn prime_field_case() {
        let k = ExtField::new(7, 1);
        assert_eq!(k.mul(3, 5), 1);
        assert_eq!(k.add(3, 5), 1);
    }
}
