//! Schedules and stopping bounds against values frozen from a 60-digit
//! reference evaluation (`tests/reference/formula_reference.py`).

use prob_sarah::bounds::{iteration_thresholds, stop_bound_b, stop_bounds_a};
use prob_sarah::schedule::{schedule_a, schedule_b, ScheduleInputs, ScheduleParams};
use serde_json::Value;

/// Largest tolerated distance, in units in the last place, between a real
/// output and the correctly rounded reference.
pub const MAX_ULPS: u64 = 0;

pub fn ulps(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    if a.signum() != b.signum() {
        return u64::MAX;
    }
    a.to_bits().abs_diff(b.to_bits())
}

pub fn fixture() -> Vec<Value> {
    let text = include_str!("../fixtures/formula_reference.json");
    let v: Value = serde_json::from_str(text).unwrap();
    v["configs"].as_array().unwrap().clone()
}

pub fn inputs(c: &Value) -> (usize, ScheduleInputs) {
    let i = &c["input"];
    let f = |k: &str| i[k].as_f64().unwrap();
    (
        i["j"].as_u64().unwrap() as usize,
        ScheduleInputs {
            n: i["n"].as_u64().unwrap() as usize,
            eps: f("eps"),
            delta: f("delta"),
            lipschitz: f("lipschitz"),
            alpha_m: f("alpha_m"),
            diameter: f("diameter"),
        },
    )
}

/// Outcome of comparing every config: the worst real-valued distance and
/// every integer mismatch.
#[derive(Debug, Default)]
pub struct Comparison {
    pub configs: usize,
    pub worst_ulps: u64,
    pub worst_at: String,
    pub integer_mismatches: Vec<String>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.worst_ulps <= MAX_ULPS && self.integer_mismatches.is_empty()
    }

    fn real(&mut self, got: f64, want: &Value, what: String) {
        let u = ulps(got, want.as_f64().unwrap());
        if u > self.worst_ulps {
            self.worst_ulps = u;
            self.worst_at = what;
        }
    }

    fn int(&mut self, got: Option<u64>, want: Option<u64>, what: String) {
        if got != want {
            self.integer_mismatches.push(format!("{what}: {got:?} vs {want:?}"));
        }
    }

    fn schedule(&mut self, p: &ScheduleParams, e: &Value, tag: &str) {
        for (name, got) in [
            ("eta", p.eta),
            ("l", p.l),
            ("q", p.q),
            ("tau", p.tau),
            ("delta_prime", p.delta_prime),
            ("eps_j", p.eps_j),
            ("eps_tilde_sq", p.eps_tilde_sq),
        ] {
            self.real(got, &e[name], format!("{tag}.{name}"));
        }
        for (name, got) in [
            ("big_batch", p.big_batch),
            ("inner_len", p.inner_len),
            ("mini_batch", p.mini_batch),
        ] {
            self.int(Some(got as u64), e[name].as_u64(), format!("{tag}.{name}"));
        }
    }
}

pub fn compare_all() -> Comparison {
    let configs = fixture();
    let mut cmp = Comparison {
        configs: configs.len(),
        ..Comparison::default()
    };
    for (idx, c) in configs.iter().enumerate() {
        let (j, inp) = inputs(c);
        let e = &c["expected"];
        let i = &c["input"];
        cmp.schedule(&schedule_a(j, &inp).unwrap(), &e["schedule_a"], &format!("#{idx} A"));
        cmp.schedule(&schedule_b(j, &inp).unwrap(), &e["schedule_b"], &format!("#{idx} B"));

        let sb = stop_bounds_a(
            inp.eps,
            inp.delta,
            inp.n,
            inp.lipschitz,
            i["delta_f"].as_f64().unwrap(),
            inp.alpha_m,
        )
        .unwrap();
        let es = &e["stop_bounds_a"];
        for (name, got) in [("c1", sb.c1), ("c2", sb.c2), ("c3", sb.c3), ("c4", sb.c4)] {
            cmp.real(got, &es[name], format!("#{idx} {name}"));
        }
        for (name, got) in [
            ("t1", sb.t1),
            ("t2", sb.t2),
            ("t3", sb.t3),
            ("t4", sb.t4),
            ("outer_cap", sb.outer_cap),
        ] {
            cmp.int(Some(got), es[name].as_u64(), format!("#{idx} {name}"));
        }
        let (t5, _) = stop_bound_b(inp.eps, inp.n, inp.lipschitz, i["delta_f0"].as_f64().unwrap()).unwrap();
        cmp.int(Some(t5), e["stop_bound_b"].as_u64(), format!("#{idx} T5"));

        let it = iteration_thresholds(inp.eps, inp.n).unwrap();
        let ei = &e["iteration_thresholds"];
        cmp.int(Some(it.t_plain), ei["t_plain"].as_u64(), format!("#{idx} t_plain"));
        cmp.int(it.t_log, ei["t_log"].as_u64(), format!("#{idx} t_log"));
    }
    cmp
}
