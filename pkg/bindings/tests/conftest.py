import pytest

pytest.importorskip("spatialmem_bindings",
                    reason="bindings package not installed; primary suite "
                           "runs standalone")
