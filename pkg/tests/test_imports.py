def test_imports():
    import vemmhd  # noqa: F401
    import vemmhd.cli  # noqa: F401
    import vemmhd.experiments  # noqa: F401
    import vemmhd.system  # noqa: F401

    assert vemmhd.__version__
