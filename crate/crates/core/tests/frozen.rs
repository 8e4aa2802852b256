//! Kernel values from an independent 60-digit computation: Bessel series
//! Σ J_{x+s}(2√α)² for the diagonal, and Gram-Schmidt against the deformed
//! weight summed directly for the finite ensembles.

use cdpp::christoffel::{deformed_kernel, DeformationSpec, EnsembleSpec};
use cdpp::kernels::discrete_bessel_kernel;
use cdpp::orthopoly::WeightFamily;
use cdpp::{KernelHandle, PrecisionContext, XReal};

const P: usize = 200;

fn check(k: &KernelHandle, table: &[(i64, i64, &str)]) {
    for &(x, y, want) in table {
        let got = k.eval_f64(x as f64, y as f64, P).unwrap();
        let want = XReal::parse(want, P).unwrap();
        let rel = ((&got - &want) / &want).abs().to_f64();
        assert!(rel < 1e-42, "K({x},{y}) = {got}, want {want}, rel {rel:e}");
    }
}

#[test]
fn discrete_bessel_alpha_one() {
    let c = PrecisionContext::new(P).unwrap();
    let k = discrete_bessel_kernel(&c.real(1.0), &c).unwrap();
    check(
        &k,
        &[
            (0, 0, "0.474936459507765215747317181839812832674458402"),
            (0, 1, "0.253615218307906395623030884554698180629652758"),
            (-1, 2, "0.0511203521129890862040998706379831704424954557"),
            (3, 3, "0.00120674229140410817967887829886348264513379783"),
            (-2, -2, "0.85767504437443735014107660731580896702471118"),
        ],
    );
}

#[test]
fn charlier_one_point_deformation() {
    let c = PrecisionContext::new(P).unwrap();
    let fam = WeightFamily::charlier(c.real(1.0)).unwrap();
    let spec = EnsembleSpec::new(fam, 3, DeformationSpec::new(vec![c.real(0.5)]).unwrap()).unwrap();
    check(
        &deformed_kernel(&spec, &c).unwrap(),
        &[
            (0, 0, "0.720453761870547784123155099052966857652953872"),
            (1, 2, "0.214282618562755676298800306645796571095233148"),
            (4, 1, "-0.0361832751257042855592214548728570030271898265"),
        ],
    );
}

#[test]
fn meixner_two_point_deformation() {
    let c = PrecisionContext::new(P).unwrap();
    let fam = WeightFamily::meixner(c.real(1.5), c.real(0.3)).unwrap();
    let d = DeformationSpec::new(vec![c.real(0.5), c.real(2.3)]).unwrap();
    let spec = EnsembleSpec::new(fam, 2, d).unwrap();
    check(
        &deformed_kernel(&spec, &c).unwrap(),
        &[
            (0, 0, "0.713771813142851526001753784871548360817468619"),
            (1, 3, "0.0495831868500501778332985480594867448841702747"),
            (2, 2, "0.0097597125078143932126097123597901045167848348"),
        ],
    );
}
