"""Deterministic topological ordering of function instances."""

import pytest
from hypothesis import given, strategies as st

from cockpit.catena import CycleError, evaluation_order, topological_order
from cockpit.catena.instances import FunctionInstance, ProducerRef, VisualizationCatena


def _catena(edges: dict[str, list[str]]) -> VisualizationCatena:
    """Build a catena whose instances consume each other per ``edges``."""
    vc = VisualizationCatena()
    for fid, inputs in edges.items():
        bindings = {f"in{i}": ProducerRef(instance=src, output="out")
                    for i, src in enumerate(inputs)}
        vc.function_instances[fid] = FunctionInstance(id=fid, function="fn-x",
                                                      slot_bindings=bindings)
    return vc


def test_single_chain():
    vc = _catena({"a": [], "b": ["a"], "c": ["b"]})
    assert evaluation_order(vc) == ["a", "b", "c"]


def test_tie_break_by_ascending_id():
    vc = _catena({"f2": [], "f1": []})
    assert evaluation_order(vc) == ["f1", "f2"]


def test_aggregation_precedes_tolerance_check(composed):
    order = evaluation_order(composed.catena)
    assert order.index("fi-m-effort-aggregated") < order.index("fi-m-effort-deviation")


def test_cycle_names_members():
    vc = _catena({"a": ["c"], "b": ["a"], "c": ["b"]})
    with pytest.raises(CycleError) as err:
        evaluation_order(vc)
    assert set(err.value.members) == {"a", "b", "c"}


def _oracle_order(nodes: list[str], edges: list[tuple[str, str]]) -> list[str]:
    """Quadratic reference: repeatedly take the smallest id whose producers
    are all processed."""
    node_set = set(nodes)
    remaining = sorted(node_set)
    done: set[str] = set()
    out: list[str] = []
    while remaining:
        for node in remaining:
            producers = [p for p, c in edges if c == node and p in node_set]
            if all(p in done for p in producers):
                out.append(node)
                done.add(node)
                remaining.remove(node)
                break
        else:
            raise AssertionError("cycle in oracle input")
    return out


@st.composite
def _random_dag(draw):
    n = draw(st.integers(min_value=1, max_value=9))
    nodes = [f"n{i:02d}" for i in range(n)]
    edges = []
    for j in range(n):
        for i in range(j):
            if draw(st.booleans()):
                edges.append((nodes[i], nodes[j]))
    # random relabeling so index order does not equal id order
    labels = draw(st.permutations(nodes))
    mapping = dict(zip(nodes, labels))
    return [mapping[x] for x in nodes], [(mapping[a], mapping[b]) for a, b in edges]


@given(_random_dag())
def test_order_matches_independent_oracle(dag):
    nodes, edges = dag
    order = topological_order(nodes, edges)
    assert sorted(order) == sorted(nodes)  # permutation
    position = {node: i for i, node in enumerate(order)}
    for producer, consumer in edges:
        assert position[producer] < position[consumer]
    assert order == _oracle_order(nodes, edges)
