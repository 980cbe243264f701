from __future__ import annotations

import pytest
from hypothesis import given

from chorda import (
    EndEvent,
    StartEvent,
    StatementClass,
    Store,
    SubProcess,
    Task,
    TaskKind,
    bind_by_name,
    bind_group,
    expand,
    generate_skeleton,
    validate_model,
)
from chorda.orchestrate import BindingError, ExpansionError, GroupBinding, unresolved_root_groups

from .strategies import documents


def sub_by_name(pool, name):
    return next(n for n in pool.nodes if isinstance(n, SubProcess) and n.name == name)


def all_nodes(model):
    out = []
    for pool in model.pools:
        stack = list(pool.nodes)
        while stack:
            node = stack.pop(0)
            out.append(node)
            if isinstance(node, SubProcess):
                stack.extend(node.nodes)
    return out


class TestBindGroup:
    def test_binding_is_recorded(self, fig3_doc):
        model, _ = generate_skeleton(fig3_doc)
        process = sub_by_name(model.pools[1], "Process report")
        bindings = bind_group(model, (), "cio", ("Prepare IT plan",), process.id)
        assert bindings == (GroupBinding("cio", ("Prepare IT plan",), process.id),)

    def test_rebinding_replaces(self, fig3_doc, fig4_doc):
        model, _ = generate_skeleton(fig4_doc)
        process = sub_by_name(model.pools[1], "Process report")
        bindings = bind_group(model, (), "cio", ("Prepare IT plan",), process.id)
        # a second target in the same pool, bound over the first
        expanded, _ = expand(model, fig4_doc, ())
        other = sub_by_name(expanded.pools[1], "Prepare IT plan")
        rebound = bind_group(expanded, bindings, "cio", ("Prepare IT plan",), other.id)
        assert len(rebound) == 1
        assert rebound[0].target_sub_process_id == other.id

    def test_wrong_pool_is_an_error(self, fig3_doc):
        model, _ = generate_skeleton(fig3_doc)
        process = sub_by_name(model.pools[1], "Process report")
        with pytest.raises(BindingError, match="not in 'external consultant'"):
            bind_group(model, (), "external consultant", ("Plan",), process.id)

    def test_unknown_participant(self, fig3_doc):
        model, _ = generate_skeleton(fig3_doc)
        with pytest.raises(BindingError, match="unknown participant"):
            bind_group(model, (), "nobody", ("Plan",), "n6")

    def test_unknown_sub_process(self, fig3_doc):
        model, _ = generate_skeleton(fig3_doc)
        with pytest.raises(BindingError, match="unknown sub-process"):
            bind_group(model, (), "cio", ("Plan",), "n999")


class TestStoreAndPlanWalkthrough:
    """The store-a-copy / prepare-a-plan Local modeling example."""

    def test_pool_gains_task_store_and_nested_group(self, fig4_doc):
        model, _ = generate_skeleton(fig4_doc)
        expanded, links = expand(model, fig4_doc, ())
        cio = expanded.pools[1]
        kinds = [type(n).__name__ for n in cio.nodes]
        assert kinds == ["StartEvent", "Task", "SubProcess", "Task", "Store", "SubProcess", "EndEvent"]
        store_task = cio.nodes[3]
        assert store_task.name == "The CIO shall store a copy of the report into the archive."
        store = cio.nodes[4]
        assert isinstance(store, Store) and store.name == "archive" and store.data_object_id == "archive"
        # the chain skips the store; a branch flow feeds it from the task
        assert any(f.source_id == store_task.id and f.target_id == store.id for f in cio.sequence_flows)
        plan = cio.nodes[5]
        assert plan.name == "Prepare IT plan"
        body_kinds = [type(n).__name__ for n in plan.nodes]
        assert body_kinds == ["StartEvent", "Task", "Task", "EndEvent"]
        assert [f.source_id for f in plan.sequence_flows] == [n.id for n in plan.nodes[:-1]]

    def test_one_trace_link_per_local_statement(self, fig4_doc):
        model, _ = generate_skeleton(fig4_doc)
        _, links = expand(model, fig4_doc, ())
        assert [l.statement_id for l in links] == ["l1", "l2", "l3"]
        by_id = {l.statement_id: l for l in links}
        assert len(by_id["l1"].element_ids) == 3  # task + store + branch flow
        assert len(by_id["l2"].element_ids) == 1

    def test_result_is_valid(self, fig4_doc):
        model, _ = generate_skeleton(fig4_doc)
        expanded, _ = expand(model, fig4_doc, ())
        assert validate_model(expanded) == []


class TestExpandBasics:
    def test_no_local_statements_leaves_model_unchanged(self, fig3_doc):
        model, _ = generate_skeleton(fig3_doc)
        expanded, links = expand(model, fig3_doc, ())
        assert expanded == model and links == []

    def test_pct_bound_group_gets_three_chained_tasks(self, corpus_doc):
        model, _ = generate_skeleton(corpus_doc)
        ro_pool = next(p for p in model.pools if p.participant_id == "receiving office")
        target = sub_by_name(ro_pool, "Process international application")
        bindings = bind_group(model, (), "receiving office", ("Process International Application",), target.id)
        expanded, _ = expand(model, corpus_doc, bindings)
        filled = sub_by_name(
            next(p for p in expanded.pools if p.participant_id == "receiving office"),
            "Process international application",
        )
        tasks = [n for n in filled.nodes if isinstance(n, Task)]
        assert len(tasks) == 3
        assert [type(n).__name__ for n in filled.nodes] == [
            "StartEvent",
            "Task",
            "Task",
            "Task",
            "EndEvent",
        ]
        chain = [(f.source_id, f.target_id) for f in filled.sequence_flows]
        assert chain == [(filled.nodes[i].id, filled.nodes[i + 1].id) for i in range(4)]

    def test_expansion_is_idempotent(self, corpus_doc):
        model, _ = generate_skeleton(corpus_doc)
        bindings = bind_by_name(model, corpus_doc)
        once, links_once = expand(model, corpus_doc, bindings)
        twice, links_twice = expand(once, corpus_doc, bindings)
        assert once == twice and links_once == links_twice

    def test_skeleton_elements_are_untouched(self, corpus_doc):
        model, _ = generate_skeleton(corpus_doc)
        bindings = bind_by_name(model, corpus_doc)
        expanded, _ = expand(model, corpus_doc, bindings)
        assert expanded.message_flows == model.message_flows
        before = {n.id for n in all_nodes(model) if isinstance(n, Task) and n.kind is not TaskKind.GENERIC}
        after = {n.id for n in all_nodes(expanded) if isinstance(n, Task) and n.kind is not TaskKind.GENERIC}
        assert before == after

    def test_new_pool_for_local_only_participant(self):
        from chorda import parse_document

        text = (
            "@chorda 1\n"
            '@statement id=i1 class=I sender="alpha team" receiver="beta desk" data="report"\n'
            "The {{p:alpha team}} sends the [[d:report]] to the {{p:beta desk}}.\n"
            "@end\n"
            '@statement id=l1 class=L participant="watchdog" group="Audit"\n'
            "The {{p:watchdog}} reviews everything.\n"
            "@end\n"
        )
        doc, diags = parse_document(text)
        model, _ = generate_skeleton(doc)
        assert len(model.pools) == 2  # local-only participants get no skeleton pool
        expanded, _ = expand(model, doc, ())
        assert [p.participant_id for p in expanded.pools] == ["alpha team", "beta desk", "watchdog"]
        watchdog = expanded.pools[2]
        assert [type(n).__name__ for n in watchdog.nodes] == ["StartEvent", "SubProcess", "EndEvent"]
        assert watchdog.nodes[1].name == "Audit"
        assert validate_model(expanded) == []

    def test_binding_against_expansion_output_is_rejected(self, fig4_doc):
        model, _ = generate_skeleton(fig4_doc)
        expanded, _ = expand(model, fig4_doc, ())
        plan = sub_by_name(expanded.pools[1], "Prepare IT plan")
        bindings = (GroupBinding("cio", ("Prepare IT plan",), plan.id),)
        with pytest.raises(ExpansionError, match="previous expansion"):
            expand(expanded, fig4_doc, bindings)

    def test_duplicate_sibling_group_names_are_rejected(self, corpus_doc):
        from chorda import parse_document

        text = (
            "@chorda 1\n"
            '@statement id=i1 class=I sender="alpha team" receiver="beta desk" data="report"\n'
            "The {{p:alpha team}} sends the [[d:report]] to the {{p:beta desk}}.\n"
            "@end\n"
            '@statement id=l1 class=L participant="beta desk" group="A/Shared"\n'
            "The {{p:beta desk}} does one thing.\n"
            "@end\n"
            '@statement id=l2 class=L participant="beta desk" group="B/Shared"\n'
            "The {{p:beta desk}} does another thing.\n"
            "@end\n"
        )
        doc, _ = parse_document(text)
        model, _ = generate_skeleton(doc)
        process = sub_by_name(model.pools[1], "Process report")
        bindings = bind_group(model, (), "beta desk", ("A",), process.id)
        bindings = bind_group(model, bindings, "beta desk", ("B",), process.id)
        with pytest.raises(ExpansionError, match="duplicate sibling group names"):
            expand(model, doc, bindings)


class TestUnresolvedGroups:
    def test_all_corpus_groups_bind_by_name(self, corpus_doc):
        model, _ = generate_skeleton(corpus_doc)
        bindings = bind_by_name(model, corpus_doc)
        assert unresolved_root_groups(model, corpus_doc, bindings) == []

    def test_missing_binding_is_reported(self, corpus_doc):
        model, _ = generate_skeleton(corpus_doc)
        bindings = tuple(
            b for b in bind_by_name(model, corpus_doc) if b.group_path != ("Process Record Copy",)
        )
        unresolved = unresolved_root_groups(model, corpus_doc, bindings)
        assert unresolved == [("international bureau", "Process Record Copy")]

    def test_pool_less_participants_are_not_flagged(self):
        from chorda import parse_document

        text = (
            "@chorda 1\n"
            '@statement id=l1 class=L participant="watchdog" group="Audit"\n'
            "The {{p:watchdog}} reviews everything.\n"
            "@end\n"
        )
        doc, _ = parse_document(text)
        model, _ = generate_skeleton(doc)
        assert unresolved_root_groups(model, doc, ()) == []


class TestExpansionProperties:
    @given(documents(max_statements=8))
    def test_task_and_group_counts(self, doc):
        model, _ = generate_skeleton(doc)
        expanded, links = expand(model, doc, ())
        locals_ = [s for s in doc.statements if s.cls is StatementClass.LOCAL]
        added_tasks = [n for n in all_nodes(expanded) if isinstance(n, Task) and n.kind is TaskKind.GENERIC]
        assert len(added_tasks) == len(locals_)
        assert len(links) == len(locals_)
        groups = {
            (s.participants[0], s.group_path[: k + 1])
            for s in locals_
            for k in range(len(s.group_path))
        }
        skeleton_subs = {n.id for n in all_nodes(model) if isinstance(n, SubProcess)}
        added_subs = [
            n for n in all_nodes(expanded) if isinstance(n, SubProcess) and n.id not in skeleton_subs
        ]
        assert len(added_subs) == len(groups)

    @given(documents(max_statements=8))
    def test_idempotent_and_valid(self, doc):
        model, _ = generate_skeleton(doc)
        bindings = bind_by_name(model, doc)
        once, links_once = expand(model, doc, bindings)
        assert validate_model(once) == []
        twice, links_twice = expand(once, doc, bindings)
        assert once == twice and links_once == links_twice

    @given(documents(max_statements=8))
    def test_nesting_depth_matches_group_depth(self, doc):
        model, _ = generate_skeleton(doc)
        expanded, _ = expand(model, doc, ())
        max_path = max((len(s.group_path) for s in doc.statements if s.cls is StatementClass.LOCAL), default=0)

        def depth(nodes):
            best = 0
            for node in nodes:
                if isinstance(node, SubProcess):
                    best = max(best, 1 + depth(node.nodes))
            return best

        skeleton_depth = max((depth(p.nodes) for p in model.pools), default=0)
        expanded_depth = max((depth(p.nodes) for p in expanded.pools), default=0)
        locals_exist = any(s.cls is StatementClass.LOCAL for s in doc.statements)
        if locals_exist and max_path:
            # unbound root groups sit at pool level, so depth grows by the path length
            assert expanded_depth >= max_path
        assert expanded_depth <= max(skeleton_depth, 0) + max_path + 1
