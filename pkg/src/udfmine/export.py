"""Deterministic text renderings: DOT, PNML and process tree notation.

Every emitter sorts its nodes and edges, so rendering the same object
always produces identical bytes.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ElementTree
from typing import Union

from .bgraph import BehaviorGraph
from .discovery import ProcessTree
from .petri import PetriNet, Transition, is_workflow_net
from .udfg import DFGView, UDFG

Renderable = Union[BehaviorGraph, UDFG, DFGView, ProcessTree, PetriNet]

BARE_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+")


def _quote(text: str) -> str:
    escaped = (
        text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    )
    return f'"{escaped}"'


def behavior_graph_to_dot(graph: BehaviorGraph) -> str:
    """Behavior graph as DOT; indeterminate events get dashed borders."""
    lines = ["digraph behavior_graph {", "  rankdir=LR;"]
    for event_id in sorted(graph.event_ids):
        event = graph.event(event_id)
        label = f"{event_id}\n{{{', '.join(sorted(event.activities))}}}"
        attrs = [f"label={_quote(label)}"]
        if not event.determinate:
            attrs.append("style=dashed")
        lines.append(f"  {_quote(event_id)} [{', '.join(attrs)}];")
    for v, w in sorted(graph.edges):
        lines.append(f"  {_quote(v)} -> {_quote(w)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def udfg_to_dot(udfg: UDFG, *, annotate: bool = True) -> str:
    """UDFG as DOT, node and arc labels carrying min/max when annotated."""
    lines = ["digraph udfg {", "  rankdir=LR;"]
    for activity in sorted(udfg.nodes):
        lo, hi = udfg.nodes[activity]
        label = f"{activity}\n{lo}/{hi}" if annotate else activity
        lines.append(f"  {_quote(activity)} [label={_quote(label)}];")
    for a, b in sorted(udfg.arcs):
        lo, hi = udfg.arcs[(a, b)]
        attrs = f" [label={_quote(f'{lo}/{hi}')}]" if annotate else ""
        lines.append(f"  {_quote(a)} -> {_quote(b)}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def view_to_dot(view: DFGView) -> str:
    """Sliced graph as DOT, with start/end markers when present."""
    lines = ["digraph dfg_slice {", "  rankdir=LR;"]
    for activity in sorted(view.activities):
        lines.append(f"  {_quote(activity)};")
    if view.start_acts:
        lines.append('  "__start" [shape=point];')
    if view.end_acts:
        lines.append('  "__end" [shape=doublecircle, label=""];')
    for a, b in sorted(view.edges):
        lines.append(f"  {_quote(a)} -> {_quote(b)};")
    for a in sorted(view.start_acts):
        lines.append(f'  "__start" -> {_quote(a)} [style=dashed];')
    for a in sorted(view.end_acts):
        lines.append(f'  {_quote(a)} -> "__end" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_dot(tree: ProcessTree) -> str:
    """Process tree as DOT, nodes numbered in depth-first order."""
    lines = ["digraph process_tree {"]
    edges: list[tuple[str, str]] = []
    counter = 0

    def visit(node: ProcessTree) -> str:
        nonlocal counter
        name = f"n{counter}"
        counter += 1
        if node.operator is not None:
            lines.append(f"  {name} [label={_quote(node.operator.value)}, shape=circle];")
        elif node.is_leaf:
            lines.append(f"  {name} [label={_quote(node.label)}, shape=box];")
        else:
            lines.append(f"  {name} [label={_quote('tau')}, shape=box, style=filled];")
        for child in node.children:
            edges.append((name, visit(child)))
        return name

    visit(tree)
    for parent, child in edges:
        lines.append(f"  {parent} -> {child};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def petri_to_dot(net: PetriNet) -> str:
    """Petri net as DOT: circles for places, boxes for transitions."""
    lines = ["digraph petri_net {", "  rankdir=LR;"]
    for place in net.places:
        marker = "&#9679;" if place == net.initial_place else ""
        lines.append(f"  {_quote(place)} [shape=circle, label={_quote(marker)}];")
    for transition in net.transitions:
        if transition.is_silent:
            lines.append(
                f"  {_quote(transition.tid)} [shape=box, style=filled, "
                f'fillcolor=black, label=""];'
            )
        else:
            lines.append(
                f"  {_quote(transition.tid)} [shape=box, label={_quote(transition.label)}];"
            )
    for a, b in net.arcs:
        lines.append(f"  {_quote(a)} -> {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_dot(obj: Renderable, *, annotate: bool = False) -> str:
    """Render any supported object as DOT text."""
    if isinstance(obj, BehaviorGraph):
        return behavior_graph_to_dot(obj)
    if isinstance(obj, UDFG):
        return udfg_to_dot(obj, annotate=annotate)
    if isinstance(obj, DFGView):
        return view_to_dot(obj)
    if isinstance(obj, ProcessTree):
        return tree_to_dot(obj)
    if isinstance(obj, PetriNet):
        return petri_to_dot(obj)
    raise TypeError(f"cannot render {type(obj).__name__} as DOT")


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def to_pnml(net: PetriNet) -> str:
    """Workflow net as PNML; silent transitions carry no name element."""
    if not is_workflow_net(net):
        raise ValueError("only workflow nets can be serialized to PNML")
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<pnml xmlns="http://www.pnml.org/version-2009/grammar/pnml">',
        '  <net id="net1" type="http://www.pnml.org/version-2009/grammar/pnmlcoremodel">',
        '    <page id="page1">',
    ]
    for place in net.places:
        if place == net.initial_place:
            lines.append(f'      <place id="{_xml_escape(place)}">')
            lines.append("        <initialMarking><text>1</text></initialMarking>")
            lines.append("      </place>")
        else:
            lines.append(f'      <place id="{_xml_escape(place)}"/>')
    for transition in net.transitions:
        if transition.is_silent:
            lines.append(f'      <transition id="{_xml_escape(transition.tid)}"/>')
        else:
            lines.append(f'      <transition id="{_xml_escape(transition.tid)}">')
            lines.append(
                f"        <name><text>{_xml_escape(transition.label)}</text></name>"
            )
            lines.append("      </transition>")
    for index, (a, b) in enumerate(net.arcs):
        lines.append(
            f'      <arc id="arc{index}" source="{_xml_escape(a)}" '
            f'target="{_xml_escape(b)}"/>'
        )
    lines.extend(["    </page>", "  </net>", "</pnml>"])
    return "\n".join(lines) + "\n"


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def read_pnml(text: str) -> PetriNet:
    """Parse PNML produced by :func:`to_pnml` (or compatible documents).

    The initial place is the one carrying an initial marking; the final
    place is the unique sink. Raises ValueError when the structure is not
    a workflow net the rest of the package can work with.
    """
    try:
        root = ElementTree.fromstring(text)
    except ElementTree.ParseError as exc:
        raise ValueError(f"malformed PNML: {exc}") from None

    places: list[str] = []
    marked: list[str] = []
    transitions: list[Transition] = []
    arcs: list[tuple[str, str]] = []
    for element in root.iter():
        tag = _local_name(element.tag)
        if tag == "place":
            pid = element.get("id")
            if pid is None:
                raise ValueError("place without id")
            places.append(pid)
            for child in element.iter():
                if _local_name(child.tag) == "initialMarking":
                    marked.append(pid)
                    break
        elif tag == "transition":
            tid = element.get("id")
            if tid is None:
                raise ValueError("transition without id")
            label = None
            for child in element.iter():
                if _local_name(child.tag) == "name":
                    text_el = next(
                        (g for g in child.iter() if _local_name(g.tag) == "text"),
                        None,
                    )
                    label = text_el.text if text_el is not None else None
                    break
            transitions.append(Transition(tid, label))
        elif tag == "arc":
            source, target = element.get("source"), element.get("target")
            if source is None or target is None:
                raise ValueError("arc without source/target")
            arcs.append((source, target))

    if len(marked) != 1:
        raise ValueError(f"expected exactly one initially marked place, found {len(marked)}")
    has_out = {a for a, _ in arcs}
    sinks = [p for p in places if p not in has_out]
    if len(sinks) != 1:
        raise ValueError(f"expected exactly one sink place, found {len(sinks)}")
    net = PetriNet(
        places=tuple(places),
        transitions=tuple(transitions),
        arcs=tuple(arcs),
        initial_place=marked[0],
        final_place=sinks[0],
    )
    if not is_workflow_net(net):
        raise ValueError("document does not describe a workflow net")
    return net


def _leaf_text(label: str) -> str:
    if BARE_TOKEN_RE.fullmatch(label) and label != "tau":
        return label
    escaped = label.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def tree_to_text(tree: ProcessTree) -> str:
    """Compact operator notation, e.g. ``seq(a, xor(tau, b))``."""
    if tree.is_silent:
        return "tau"
    if tree.is_leaf:
        return _leaf_text(tree.label)
    children = ", ".join(tree_to_text(child) for child in tree.children)
    return f"{tree.operator.value}({children})"
