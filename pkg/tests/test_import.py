import angularft


def test_module_imports():
    assert hasattr(angularft, "forward")
    assert hasattr(angularft, "decompose")
    assert hasattr(angularft, "verify_identity")
    assert hasattr(angularft, "main")
    assert not hasattr(angularft, "_forward_rule")


def test_all_names_resolve():
    for name in angularft.__all__:
        assert hasattr(angularft, name), name
