//! Benchmark fixtures shared by the criterion targets.

use slrf_core::lattice::sphere_lattice;
use slrf_core::{FlowConfig, LadderLattice, Method, MetricGrid};

pub fn sphere_fixture(n: usize) -> (LadderLattice, FlowConfig) {
    let config = FlowConfig {
        n,
        ..FlowConfig::default()
    };
    (
        sphere_lattice(n, config.delta_theta, 1.0),
        config,
    )
}

pub fn fd_fixture(n: usize) -> (MetricGrid, FlowConfig) {
    let config = FlowConfig {
        n,
        method: Method::Fd,
        ..FlowConfig::default()
    };
    (
        slrf_core::fd::init_metric(0.766, -0.091, n).expect("valid preset"),
        config,
    )
}
