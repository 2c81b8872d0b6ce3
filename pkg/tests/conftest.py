from pathlib import Path

import pytest

from walkalign import alignment, graph, ntriples, projection

FIXTURES = Path(__file__).parent / "fixtures"

HELIS = "http://www.fbk.eu/ontologies/virtualcoach#"
OBO = "http://purl.obolibrary.org/obo/"

FRUCTOSE = HELIS + "Fructose"
SIMPLE_CARBS = HELIS + "SimpleCarbohydrates"
FOODON_FRUCTOSE = OBO + "FOODON_03301305"
FOODON_SUGAR = OBO + "FOODON_03420108"


@pytest.fixture(scope="session")
def helis_path() -> Path:
    return FIXTURES / "helis_fragment.nt"


@pytest.fixture(scope="session")
def foodon_path() -> Path:
    return FIXTURES / "foodon_fragment.nt"


@pytest.fixture(scope="session")
def mappings_path() -> Path:
    return FIXTURES / "seed_mappings.tsv"


@pytest.fixture(scope="session")
def helis_triples(helis_path):
    return ntriples.parse_file(helis_path)


@pytest.fixture(scope="session")
def foodon_triples(foodon_path):
    return ntriples.parse_file(foodon_path)


@pytest.fixture(scope="session")
def seed_mappings(mappings_path):
    return alignment.load_mappings(mappings_path)


@pytest.fixture(scope="session")
def fragment_graph(helis_triples, foodon_triples, seed_mappings):
    """The two projected fragments bridged by the 0.9 equivalence mapping."""
    left = projection.project(helis_triples)
    right = projection.project(foodon_triples)
    lexicon = projection.LexicalTable()
    lexicon.merge(left.lexicon)
    lexicon.merge(right.lexicon)
    merged = graph.merge([left.edges, right.edges], seed_mappings)
    return merged, lexicon
