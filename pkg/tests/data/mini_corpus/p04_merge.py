def process(batch):
    # stage one of the pipeline
    # stage two of the pipeline
    run(batch)

    # after the gap, a new thought
    run(batch)
    total = 0
    if batch:
        # inner indentation level
    # outer indentation level
        total = 1
    return total
