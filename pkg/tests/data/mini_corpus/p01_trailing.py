LIMIT = 100  # hard ceiling


def clamp(x):
    y = min(x, LIMIT)
    # never negative
    y = max(y, 0)
    return y
