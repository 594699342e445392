//! Coarsening scenarios with fixed parameters.

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Symmetric h-sessile zig-zag (2-0-11-02), L = 12, sigma = 0.2, eps = 0.01.
    Fig14,
    /// Symmetric sessile lens (2-0-02), L = 2, sigma = 1.2, eps = 0.005.
    Fig15,
    /// Symmetric h1-sessile zig-zag (3-1-00-13), L = 60, sigma = 1.2, eps = 0.002.
    Fig16,
    /// Lens on zig-zag (1-0+0-), L = 5.7, sigma = 0.7, eps = 0.003.
    Fig17,
}

impl Preset {
    /// Simulate flags pinned by the preset.
    pub fn values(self) -> Vec<(String, String)> {
        let (init, sigma, length, eps, h1m, hm, t_end, perturb) = match self {
            Preset::Fig14 => (
                "chain:(2-0-11-02)",
                "0.2",
                "12",
                "0.01",
                "0.3",
                "0.45",
                "1e5",
                "1e-6",
            ),
            Preset::Fig15 => (
                "chain:(2-0-02)",
                "1.2",
                "2",
                "0.005",
                "0.1",
                "0.2",
                "2e4",
                "1e-6",
            ),
            Preset::Fig16 => (
                "chain:(3-1-00-13)",
                "1.2",
                "60",
                "0.002",
                "0.5",
                "0.55",
                "1e5",
                "1e-6",
            ),
            Preset::Fig17 => (
                "chain:(1-0+0-)",
                "0.7",
                "5.7",
                "0.003",
                "0.9",
                "0.3",
                "1e5",
                "0",
            ),
        };
        [
            ("init", init),
            ("sigma", sigma),
            ("L", length),
            ("eps", eps),
            ("h1m", h1m),
            ("hm", hm),
            ("t_end", t_end),
            ("perturb", perturb),
            ("dt_max", "10"),
            ("output_every", "200"),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
    }
}
