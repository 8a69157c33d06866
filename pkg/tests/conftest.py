import pytest

from expweights import MrsTable, WeightSpec, build_recurrence

FREUD2 = WeightSpec.freud(2)
FREUD4 = WeightSpec.freud(4)
ERDOS = WeightSpec.erdos(2)

_CACHE = {}


def table(spec, N=256):
    """Shared (recurrence, MRS table) per weight; building is the slow part."""
    key = (spec, N)
    if key not in _CACHE:
        mrs = MrsTable(spec)
        _CACHE[key] = (build_recurrence(spec, N, mrs=mrs), mrs)
    return _CACHE[key]


@pytest.fixture(params=[FREUD2, FREUD4, ERDOS], ids=["freud2", "freud4", "erdos"])
def weight(request):
    return request.param
