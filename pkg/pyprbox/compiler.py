import json

from .nodes import PARTIES, bit_string, outcome_symbol


class Visitor(object):
    """Dispatches ``visit(node)`` to ``visit<ClassName>``; leaves (``None``)
    go to ``visitLeaf``."""

    def visit(self, node, *args):
        if node is None:
            return self.visitLeaf(*args)
        return getattr(self, 'visit%s' % node.__class__.__name__)(node, *args)

    def visitLeaf(self, *args):
        return None


class Compiler(Visitor):
    """Serializes strategies to the JSON strategy file format."""

    def __init__(self, node, **options):
        self.options = options
        self.node = node
        self.indent = options.get('indent', 1)

    def compile(self):
        return json.dumps(self.visit(self.node), indent=self.indent) + '\n'

    def data(self):
        return self.visit(self.node)

    def visitNetworkStrategy(self, network):
        counts = network.counts
        doc = {'counts': {'AB': counts.n_ab, 'AC': counts.n_ac, 'BC': counts.n_bc}}
        for party in PARTIES:
            doc[party] = self.visit(network[party])
        return doc

    def visitPartyStrategy(self, strategy):
        width = strategy.width
        rows = [
            [bit_string(word, width), setting, outcome_symbol(strategy.output_table[(word, setting)])]
            for (word, setting) in sorted(strategy.output_table, key=lambda k: (k[1], k[0]))
        ]
        return {
            'trees': [self.visit(tree) for tree in strategy.trees],
            'output_table': rows,
        }

    def visitDecisionNode(self, node):
        return {
            'box': str(node.box),
            'input': node.input,
            'on0': self.visit(node.on0),
            'on1': self.visit(node.on1),
        }


def serialize(network, **options):
    return Compiler(network, **options).compile()
