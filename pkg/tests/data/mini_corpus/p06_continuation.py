def configure(client):
    client.setup(
        retries=3,
        # midway through the arguments
        timeout=30,
    )
    result = client.ping()
    return result
