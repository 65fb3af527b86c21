"""Typed client for the hexswitch service.

By default the client calls the FastAPI app in-process, no socket or
server involved, so the CLI stays a thin client over the exact same
code path a remote deployment exercises.  Pass ``server`` to talk to a
running instance over HTTP instead.
"""

from __future__ import annotations

import asyncio
from typing import Any

import httpx


class ServiceError(RuntimeError):
    """A non-2xx answer from the service."""

    def __init__(self, status_code: int, detail: Any):
        super().__init__(f"service error {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


class _InProcessTransport(httpx.BaseTransport):
    """Hand each request straight to the ASGI app and buffer the reply."""

    def __init__(self, app: Any):
        self._asgi = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        async def call() -> tuple[httpx.Response, bytes]:
            response = await self._asgi.handle_async_request(request)
            try:
                body = await response.aread()
            finally:
                await response.aclose()
            return response, body

        response, body = asyncio.run(call())
        return httpx.Response(
            status_code=response.status_code,
            headers=response.headers,
            content=body,
        )


class ServiceClient:
    def __init__(self, server: str | None = None, timeout: float | None = None):
        if server:
            self._http = httpx.Client(base_url=server.rstrip("/"), timeout=timeout)
        else:
            from .service import create_app

            self._http = httpx.Client(
                base_url="http://hexswitch.local",
                transport=_InProcessTransport(create_app()),
                timeout=timeout,
            )

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()

    def _json(self, response: httpx.Response) -> Any:
        if response.is_success:
            return response.json()
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise ServiceError(response.status_code, detail)

    def _post(self, path: str, payload: dict[str, Any]) -> Any:
        return self._json(self._http.post(path, json=payload))

    # -- endpoint wrappers -------------------------------------------------

    def health(self) -> dict[str, Any]:
        return self._json(self._http.get("/health"))

    def mesh_build(self, height: int, width: int) -> dict[str, Any]:
        return self._post("/mesh/build", {"height": height, "width": width})

    def mesh_info(self, mesh: dict[str, Any]) -> dict[str, Any]:
        return self._post("/mesh/info", {"mesh": mesh})

    def mesh_validate(self, mesh: dict[str, Any]) -> dict[str, Any]:
        return self._post("/mesh/validate", {"mesh": mesh})

    def solve(
        self,
        problem: dict[str, Any],
        budget_ms: float | None = None,
        backend: str = "search",
    ) -> dict[str, Any]:
        payload: dict[str, Any] = {"problem": problem, "backend": backend}
        if budget_ms is not None:
            payload["budget_ms"] = budget_ms
        return self._post("/solve", payload)

    def verify(
        self,
        problem: dict[str, Any],
        solution: dict[str, Any],
        matching_semantics: bool = False,
    ) -> dict[str, Any]:
        return self._post(
            "/verify",
            {"problem": problem, "solution": solution, "matching_semantics": matching_semantics},
        )

    def rotor_generate(self, radix: int, policy: str = "spread", **mesh_source: Any) -> dict[str, Any]:
        return self._post("/rotor/generate", {"radix": radix, "policy": policy, **mesh_source})

    def rotor_run(self, **payload: Any) -> dict[str, Any]:
        return self._post("/rotor/run", payload)

    def bench_radix(self, height: int, width: int, radices: list[int], **options: Any) -> dict[str, Any]:
        return self._post(
            "/bench/radix", {"height": height, "width": width, "radices": radices, **options}
        )

    def bench_meshscale(self, sizes: list[int], **options: Any) -> dict[str, Any]:
        return self._post("/bench/meshscale", {"sizes": sizes, **options})

    def predict(self, route_length: int, table: list[list[float]] | None = None) -> dict[str, Any]:
        payload: dict[str, Any] = {"route_length": route_length}
        if table is not None:
            payload["table"] = table
        return self._post("/predict", payload)

    def latency_estimate(self, total_pucs: int, model: dict[str, Any] | None = None) -> dict[str, Any]:
        payload: dict[str, Any] = {"total_pucs": total_pucs}
        if model is not None:
            payload["model"] = model
        return self._post("/latency/estimate", payload)
