"""Shared test plumbing: a one-line-per-criterion acceptance summary."""

_CRITERIA = {
    "test_criterion_1_l1_exactness": "canonical l1 frame: exact reconstruction, unit constant, sharp bound",
    "test_criterion_2_haar_reconstruction_and_orthogonality": "Haar frame at J=8: reconstruction and p=2 orthogonality",
    "test_criterion_3_frame_constant_duality": "frame-constant duality at matched budgets",
    "test_criterion_4_unconditionality": "permutation/sign stability at covering truncation",
    "test_criterion_5_amalgam_frame": "amalgam frame: windowed reconstruction and besselian domination",
    "test_criterion_6_james_probe": "James-type probe verdicts",
    "test_criterion_7_determinism": "byte-identical report bundles across runs and parallelism",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if name in _CRITERIA and getattr(report, "when", "call") in ("call", "setup"):
                results[name] = "PASS" if status == "passed" else "FAIL"
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for idx, (name, text) in enumerate(_CRITERIA.items(), start=1):
        if name in results:
            terminalreporter.write_line(f"criterion {idx} [{results[name]}] {text}")
