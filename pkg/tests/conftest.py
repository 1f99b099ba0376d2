import pytest

from nahas import accel, nas


@pytest.fixture(scope="session")
def baseline():
    return accel.baseline_config()


@pytest.fixture(scope="session")
def s1():
    return nas.build_space("S1_mobilenetv2")


@pytest.fixture(scope="session")
def s2():
    return nas.build_space("S2_efficientnet")


@pytest.fixture(scope="session")
def evolved():
    return nas.build_space("evolved")


@pytest.fixture(scope="session")
def mbv2(s1):
    return s1.template


@pytest.fixture(scope="session")
def tiny():
    return nas.tiny_space()
