def visit(tree):
    count = 0
    for child in tree.children:
        # walk the child nodes
        count += visit_one(child)
    return count


def measure(items):
    # whole function explained up front
    total = sum(items)
    return total / len(items)
