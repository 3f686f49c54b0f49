//! Embedded explicit Runge-Kutta pairs, selectable by name at runtime.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

/// Right-hand side y' = f(t, y), written into the output slice.
pub type Rhs<'a> = dyn FnMut(f64, &[f64], &mut [f64]) + 'a;

/// Scratch space reused across steps.
#[derive(Debug, Clone, Default)]
pub struct StepWork {
    pub y_new: Vec<f64>,
    pub err: Vec<f64>,
    pub f_new: Vec<f64>,
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl StepWork {
    pub fn new(dim: usize, stages: usize) -> Self {
        Self {
            y_new: vec![0.0; dim],
            err: vec![0.0; dim],
            f_new: vec![0.0; dim],
            k: vec![vec![0.0; dim]; stages],
            tmp: vec![0.0; dim],
        }
    }
}

/// One attempted step of an embedded pair.
pub trait EmbeddedPair: Send + Sync {
    fn name(&self) -> &str;
    /// Order of the propagated solution.
    fn order(&self) -> u32;
    /// Order of the embedded comparison solution.
    fn error_order(&self) -> u32;
    fn stages(&self) -> usize;
    /// Advances `y` (with derivative `f0` at `t`) by `h`, filling `ws.y_new`,
    /// the local error estimate `ws.err` and the derivative `ws.f_new` at `t + h`.
    fn attempt(&self, f: &mut Rhs<'_>, t: f64, h: f64, y: &[f64], f0: &[f64], ws: &mut StepWork);
}

/// Butcher tableau of an explicit embedded pair. `e` holds b minus the embedded weights.
#[derive(Debug, Clone)]
pub struct Tableau {
    pub name: &'static str,
    pub order: u32,
    pub error_order: u32,
    pub c: &'static [f64],
    pub a: &'static [&'static [f64]],
    pub b: &'static [f64],
    pub e: &'static [f64],
    /// First stage of the next step equals the last stage of this one.
    pub fsal: bool,
}

impl EmbeddedPair for Tableau {
    fn name(&self) -> &str {
        self.name
    }

    fn order(&self) -> u32 {
        self.order
    }

    fn error_order(&self) -> u32 {
        self.error_order
    }

    fn stages(&self) -> usize {
        self.c.len()
    }

    fn attempt(&self, f: &mut Rhs<'_>, t: f64, h: f64, y: &[f64], f0: &[f64], ws: &mut StepWork) {
        let n = y.len();
        let s = self.c.len();
        if ws.k.len() < s || ws.tmp.len() != n {
            *ws = StepWork::new(n, s);
        }
        ws.k[0].copy_from_slice(f0);
        for i in 1..s {
            let row = self.a[i - 1];
            for d in 0..n {
                let mut acc = 0.0;
                for (j, &aij) in row.iter().enumerate() {
                    acc += aij * ws.k[j][d];
                }
                ws.tmp[d] = y[d] + h * acc;
            }
            f(t + self.c[i] * h, &ws.tmp, &mut ws.k[i]);
        }
        for d in 0..n {
            let mut acc = 0.0;
            let mut err = 0.0;
            for j in 0..s {
                acc += self.b[j] * ws.k[j][d];
                err += self.e[j] * ws.k[j][d];
            }
            ws.y_new[d] = y[d] + h * acc;
            ws.err[d] = h * err;
        }
        if self.fsal {
            ws.f_new.copy_from_slice(&ws.k[s - 1]);
        } else {
            f(t + h, &ws.y_new, &mut ws.f_new);
        }
    }
}

const DP5_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP5_BHAT: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const fn diff<const S: usize>(a: [f64; S], b: [f64; S]) -> [f64; S] {
    let mut out = [0.0; S];
    let mut i = 0;
    while i < S {
        out[i] = a[i] - b[i];
        i += 1;
    }
    out
}

static DP5_E: [f64; 7] = diff(DP5_B, DP5_BHAT);

/// Dormand-Prince 5(4).
pub static DORMAND_PRINCE: Tableau = Tableau {
    name: "dopri5",
    order: 5,
    error_order: 4,
    c: &[0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0],
    a: &[
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
        &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
        &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ],
    b: &DP5_B,
    e: &DP5_E,
    fsal: true,
};

const CK_B: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
const CK_BHAT: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    1.0 / 4.0,
];
static CK_E: [f64; 6] = diff(CK_B, CK_BHAT);

/// Cash-Karp 5(4).
pub static CASH_KARP: Tableau = Tableau {
    name: "cash-karp",
    order: 5,
    error_order: 4,
    c: &[0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0],
    a: &[
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0],
        &[-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0],
        &[
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ],
    b: &CK_B,
    e: &CK_E,
    fsal: false,
};

const RKF_B: [f64; 6] = [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];
const RKF_BHAT: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];
static RKF_E: [f64; 6] = diff(RKF_B, RKF_BHAT);

/// Runge-Kutta-Fehlberg 4(5), advancing with the fifth-order weights.
pub static FEHLBERG: Tableau = Tableau {
    name: "fehlberg",
    order: 5,
    error_order: 4,
    c: &[0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0],
    a: &[
        &[1.0 / 4.0],
        &[3.0 / 32.0, 9.0 / 32.0],
        &[1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0],
        &[439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0],
        &[-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
    ],
    b: &RKF_B,
    e: &RKF_E,
    fsal: false,
};

pub const DEFAULT_METHOD: &str = "dopri5";

/// Named collection of integration methods.
#[derive(Clone, Default)]
pub struct MethodRegistry {
    methods: BTreeMap<String, Arc<dyn EmbeddedPair>>,
}

impl MethodRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(DORMAND_PRINCE.clone()));
        r.register(Arc::new(CASH_KARP.clone()));
        r.register(Arc::new(FEHLBERG.clone()));
        r
    }

    pub fn register(&mut self, method: Arc<dyn EmbeddedPair>) {
        self.methods.insert(method.name().to_string(), method);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn EmbeddedPair>> {
        self.methods.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&str> {
        self.methods.keys().map(String::as_str).collect()
    }
}

/// Registry holding the built-in methods.
pub fn builtin_methods() -> &'static MethodRegistry {
    static REG: OnceLock<MethodRegistry> = OnceLock::new();
    REG.get_or_init(MethodRegistry::with_builtins)
}

/// Looks up a built-in method by name.
pub fn method(name: &str) -> Option<Arc<dyn EmbeddedPair>> {
    builtin_methods().get(name)
}
