async def pump(queue):
    # drain until cancelled
    while True:
        item = await queue.get()
        handle(item)


def snapshot(path):
    data = read(path)

    # persist under an exclusive lock
    with open(path + ".bak", "w") as f:
        f.write(data)
