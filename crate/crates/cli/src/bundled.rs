//! Scenarios shipped inside the binary.

pub const BUNDLED: &[(&str, &str)] = &[
    ("brackets-su2", include_str!("../scenarios/brackets-su2.json")),
    ("dfp-oscillating-source", include_str!("../scenarios/dfp-oscillating-source.json")),
    ("dfp-plane-wave", include_str!("../scenarios/dfp-plane-wave.json")),
    ("dual-moving-coulomb", include_str!("../scenarios/dual-moving-coulomb.json")),
    ("fock-logistic", include_str!("../scenarios/fock-logistic.json")),
    ("free-particle-coulomb", include_str!("../scenarios/free-particle-coulomb.json")),
    ("free-particle-uniform", include_str!("../scenarios/free-particle-uniform.json")),
    ("lorentz-classical", include_str!("../scenarios/lorentz-classical.json")),
    ("lorentz-modified", include_str!("../scenarios/lorentz-modified.json")),
    ("quantum-ehrenfest", include_str!("../scenarios/quantum-ehrenfest.json")),
    ("quantum-free-gaussian", include_str!("../scenarios/quantum-free-gaussian.json")),
    ("quantum-magnetic", include_str!("../scenarios/quantum-magnetic.json")),
    ("radiation-shell", include_str!("../scenarios/radiation-shell.json")),
];

pub fn get(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
