use koenigs_core::catalog;
use koenigs_core::completeness::{decide_topological, decide_weak_star, predicted_components};
use koenigs_core::geometry::default_window;
use koenigs_core::{DefiningFunction, Tri};

fn battery() -> Vec<(&'static str, DefiningFunction)> {
    vec![
        ("strip", catalog::strip()),
        ("half-plane", catalog::half_plane()),
        ("quadrant", catalog::quadrant()),
        ("upper-half-plane", catalog::upper_half_plane()),
        ("point-spike", catalog::point_spike()),
        ("double-spike", catalog::double_spike()),
        ("comb", catalog::comb()),
        ("oscillation-cantor", catalog::oscillation_cantor()),
        ("minus-inf-gap", catalog::minus_inf_gap()),
        ("two-gaps", catalog::two_gaps()),
        ("full-strip", catalog::full_strip()),
        ("du-oscillation", catalog::du_oscillation()),
    ]
}

#[test]
fn psi_side_and_raster_side_agree() {
    for (name, psi) in battery() {
        let w = decide_weak_star(&psi);
        let t = decide_topological(&psi, default_window(&psi), 512).unwrap();
        if w.status != Tri::Unknown && t.verdict != Tri::Unknown {
            assert_eq!(w.status, t.verdict, "{}", name);
        }
        if let (Some(p), Some(c)) = (predicted_components(&psi), t.components) {
            assert_eq!(p, c, "{}", name);
        }
        let reg = psi.equals_regularized().equal;
        if reg != Tri::Unknown && t.int_closure_ok != Tri::Unknown {
            assert_eq!(reg, t.int_closure_ok, "{}", name);
        }
    }
}
