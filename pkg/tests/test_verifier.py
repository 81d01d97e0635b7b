"""不变量校验器"""

from otcoh.characters import Backend, BundleClass, Classification
from otcoh.verifier import OTVerifier


def _names(entries):
    return {entry.name for entry in entries}


class TestVerifier:
    """OTVerifier"""

    def test_cubic_passes(self, cubic_classes):
        verifier = OTVerifier(cubic_classes, symbolic=False)
        entries = verifier.verify()
        assert all(entry.passed for entry in entries), verifier.get_errors()
        assert {"partition", "binomial_hodge_identity", "serre_duality", "oracle_dolbeault"} <= _names(entries)
        assert verifier.get_validation_report()["passed"]

    def test_paired_passes_with_symbolic_checks(self, paired_classes):
        verifier = OTVerifier(paired_classes, random_forms=10)
        entries = verifier.verify()
        assert all(entry.passed for entry in entries), verifier.get_errors()
        assert {"dbar_squared", "dbar_on_harmonic_model", "d_on_invariant_model"} <= _names(entries)

    def test_residual_entries(self, cubic_classes):
        entries = OTVerifier(cubic_classes, symbolic=False).verify()
        residuals = [entry for entry in entries if entry.name.startswith("residual.")]
        assert residuals
        assert all(entry.residual < cubic_classes.model.tolerance for entry in residuals)

    def test_broken_partition_is_reported(self, t1_classes):
        # 把平凡类拆开，求和恒等式仍成立但幺模合并失败
        trivial = t1_classes.trivial_class
        first, second = trivial.members
        split = [
            BundleClass(id="trivial", members=(first,), trivial=True, character=trivial.character),
            BundleClass(id="split", members=(second,), trivial=False, character=trivial.character),
        ] + [c for c in t1_classes if not c.trivial]
        broken = Classification(t1_classes.model, Backend.GENERIC, split)
        verifier = OTVerifier(broken, symbolic=False)
        verifier.verify()
        report = verifier.get_validation_report()
        assert not report["passed"]
        assert any(error.startswith("unimodular_merge") for error in report["errors"])
