import smach


class Patrol(smach.StateMachine):
    def __init__(self, robot, waypoints):
        smach.StateMachine.__init__(self, outcomes=["done"])
        with self:
            for i, wp in enumerate(waypoints):
                smach.StateMachine.add("WP_%d" % i, NavigateToWaypoint(robot, wp), transitions={"arrived": "done"})
