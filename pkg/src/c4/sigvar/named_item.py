
class NamedItem:
    """something with a label: a cluster, a writer"""

    def __init__(self, name):
        self.name = str(name) if name is not None else ""

    def __repr__(self):
        return "{}({})".format(type(self).__name__, self.name)

    def __str__(self):
        return self.name
